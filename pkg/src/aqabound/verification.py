"""Self-checks behind ``aqabound verify``.

Every check returns a :class:`Check`; none of them raise on failure so a
suite always reports all of its results.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from math import comb

import numpy as np

from . import algorithms as zoo
from .bounds import (
    compute_bound,
    delta_v,
    kclique_combinatorial,
    kclique_meanfield,
    moments_check,
)
from .dynamics import Schedule, integrate, verify_chain
from .errors import PropertyViolation
from .graph_tools import count_kcliques, random_graph
from .quantum_core import expectation, overlap_sq


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _close(name: str, got: float, want: float, tol: float) -> Check:
    err = abs(got - want)
    return Check(name, err <= tol, f"got {got!r}, expected {want!r}, |err|={err:.2e}")


def closed_forms() -> list[Check]:
    out = []
    for n in range(2, 9):
        N = 2**n
        das_c = zoo.dj_das(n, zoo.BooleanFunctionSpec.constant(0))
        das_b = zoo.dj_das(n, zoo.BooleanFunctionSpec.balanced(n))
        out.append(_close(f"dj-das constant n={n}", overlap_sq(das_c.phi1, das_c.phi0), 1 / N, 1e-12))
        out.append(_close(f"dj-das balanced n={n}", overlap_sq(das_b.phi1, das_b.phi0), 1 - 1 / N, 1e-12))
        for f in (zoo.BooleanFunctionSpec.constant(1), zoo.BooleanFunctionSpec.balanced(0)):
            wei = zoo.dj_wei(n, f)
            out.append(_close(f"dj-wei {f.kind} n={n}", overlap_sq(wei.phi1, wei.phi0), 0.5, 1e-12))
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        s = "".join(rng.choice(["0", "1"], size=n))
        bv = zoo.bernstein_vazirani(n, s)
        out.append(_close(f"bv <H1>_0 n={n} s={s}", expectation(bv.h1, bv.phi0), 0.5, 1e-12))
    for n in range(3, 11):
        out.append(_close(f"ising deltaV n={n}", delta_v(zoo.ising_counterexample(n)), math.sqrt(n), 1e-10))
    for n in (2, 3, 4, 5):
        for M in (1, 2):
            g = zoo.grover(n, range(M))
            x = M / 2**n
            out.append(_close(f"grover deltaV N={2**n} M={M}", delta_v(g), math.sqrt(x * (1 - x)), 1e-12))
    return out


def moments_suite(seed: int = 7) -> list[Check]:
    out = []
    projector_problems = [
        zoo.dj_das(4, zoo.BooleanFunctionSpec.constant()),
        zoo.dj_wei(4, zoo.BooleanFunctionSpec.balanced(1)),
        zoo.bernstein_vazirani(4, "1011"),
        zoo.grover(4, [3, 9]),
    ]
    for p in projector_problems:
        holds, res = moments_check(p)
        out.append(Check(f"moments hold: {p.name}", holds and res < 1e-12, f"residual {res:.2e}"))
    g = random_graph(8, 0.5, seed)
    for k in (3, 4):
        holds, res = moments_check(zoo.kclique(g, k, deformed=True))
        out.append(Check(f"moments hold: deformed kclique k={k}", holds, f"residual {res:.2e}"))
        holds, res = moments_check(zoo.kclique(g, k, deformed=False))
        out.append(Check(f"moments fail as expected: raw kclique k={k}", not holds, f"residual {res:.2e}"))
    return out


def random_clique_suite() -> list[Check]:
    out = []
    for n, k in ((6, 3), (8, 4), (10, 5)):
        for p in (0.25, 0.5, 0.75):
            mf = kclique_meanfield(n, k, p)
            cb = kclique_combinatorial(n, k, p)
            err = max(abs(mf.eH - cb.eH), abs(mf.eH2 - cb.eH2))
            out.append(Check(f"mean-field == combinatorial n={n} k={k} p={p}", err <= 1e-12, f"max err {err:.2e}"))
    mf = kclique_meanfield(10, 5, 0.5)
    out.append(_close("E[h] k=5 p=1/2", mf.eH, 5.0, 1e-12))
    out.append(_close("E[h^2] k=5 p=1/2", mf.eH2, 27.5, 1e-12))
    ratio = kclique_meanfield(12, 5, 0.5).tRandInf / kclique_meanfield(12, 6, 0.5).tRandInf
    out.append(_close("tRandInf ratio k=5:k=6", ratio, math.sqrt(1.5), 1e-12))
    return out


def chain_suite(T_values=(0.5, 5.0), epsilons=(0.1, 0.25)) -> list[Check]:
    """Inequality chain and the runtime bound on a small set of simulated runs."""
    g = random_graph(5, 0.8, 1)
    problems = [
        zoo.dj_das(2, zoo.BooleanFunctionSpec.constant()),
        zoo.dj_wei(3, zoo.BooleanFunctionSpec.balanced(0)),
        zoo.bernstein_vazirani(2, "11"),
        zoo.grover(3, [5]),
        zoo.kclique(g, 3, deformed=True),
    ]
    out = []
    for p in problems:
        for shape in ("linear", "power"):
            for T in T_values:
                sched = Schedule.linear(T) if shape == "linear" else Schedule.power(T, 2.0)
                name = f"{p.name} {shape} T={T}"
                traj = integrate(p, sched)
                try:
                    rep = verify_chain(traj)
                    out.append(Check(f"chain {name}", True, f"min slacks {rep.min_left:.2e}, {rep.min_right:.2e}"))
                except PropertyViolation as exc:
                    out.append(Check(f"chain {name}", False, str(exc)))
                for eps in epsilons:
                    if 1 - traj.final_fidelity <= eps:
                        t_lower = compute_bound(p, eps, sched.shape_average).tLower
                        out.append(Check(f"runtime bound {name} eps={eps}", T >= t_lower - 1e-9, f"T={T} tLower={t_lower:.6g}"))
    return out


def deformed_identity(trials: int = 20, seed: int = 0) -> list[Check]:
    out = []
    for t in range(trials):
        n, k = 6 + t % 3, 3 + t % 2
        g = random_graph(n, 0.6, seed + t)
        p = zoo.kclique(g, k, deformed=True)
        M = count_kcliques(g, k)
        want = 1 - M / comb(n, k)
        mean1 = expectation(p.h1, p.phi0)
        out.append(_close(f"deformed mean n={n} k={k} seed={seed + t}", mean1, want, 1e-12))
    return out


SUITES = {
    "closed-forms": closed_forms,
    "moments": moments_suite,
    "sm5": random_clique_suite,
    "chain": chain_suite,
    "deformed": deformed_identity,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    return SUITES[name]()
