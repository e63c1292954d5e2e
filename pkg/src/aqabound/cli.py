"""Command-line entry point: ``aqabound {bound,simulate,gap,kclique,verify}``.

Every command writes one JSON document (or CSV with ``--format csv``) that
echoes the run configuration, the package version and the PRNG identifier.
Exit codes: 0 ok, 2 asymptotically invalid family (``bound --scan``),
3 property violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import math
import os
import sys
from math import comb
from pathlib import Path

import numpy as np

from . import __version__
from . import algorithms as zoo
from .bounds import (
    ASYMPTOTICALLY_INVALID,
    asymptotic_scan,
    compute_bound,
    ground_overlap,
    kclique_combinatorial,
    kclique_meanfield,
    kclique_montecarlo,
)
from .dynamics import Schedule, integrate, verify_chain
from .errors import GraphParseError, PropertyViolation, SizeCapError
from .gaps import compare_bounds, projector_case_check, sweep
from .graph_tools import PRNG_ID, Graph, count_kcliques, load_edge_list, random_graph
from .verification import SUITES, run_suite

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VIOLATION = 3
EXIT_USAGE = 64

PROBLEMS = ("dj-das", "dj-wei", "bv", "grover", "ising", "kclique")
SEED_ENV = "AQABOUND_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    """Recursively convert numpy scalars and non-finite floats for strict JSON."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


# ---------------------------------------------------------------- parsing


def parse_function(text: str) -> zoo.BooleanFunctionSpec:
    if text in ("constant", "constant0"):
        return zoo.BooleanFunctionSpec.constant(0)
    if text == "constant1":
        return zoo.BooleanFunctionSpec.constant(1)
    if text == "balanced":
        return zoo.BooleanFunctionSpec.balanced(0)
    if text.startswith("balanced:"):
        return zoo.BooleanFunctionSpec.balanced(int(text.split(":", 1)[1]))
    raise UsageError(f"unknown function {text!r}; use constant0, constant1 or balanced[:v]")


def parse_schedule(text: str, T: float) -> Schedule:
    if text == "linear":
        return Schedule.linear(T)
    if text.startswith("power:"):
        return Schedule.power(T, float(text.split(":", 1)[1]))
    raise UsageError(f"unknown schedule {text!r}; use linear or power:q")


def parse_int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def effective_seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return args.seed


def load_graph(args, n: int | None = None) -> Graph:
    if args.file:
        try:
            return load_edge_list(Path(args.file).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from None
    if args.random or n is not None or args.n is not None:
        size = n if n is not None else args.n
        if size is None:
            raise UsageError("random graphs need --n")
        return random_graph(size, args.p, effective_seed(args))
    raise UsageError("kclique needs --file or --random")


def build_problem(args, n: int | None = None) -> zoo.Problem:
    """Problem instance from the shared options; ``n`` overrides ``--n`` for scans."""
    name = args.problem
    size = n if n is not None else args.n
    if name != "kclique" and size is None:
        raise UsageError(f"{name} needs --n")
    if name == "dj-das":
        return zoo.dj_das(size, parse_function(args.function))
    if name == "dj-wei":
        return zoo.dj_wei(size, parse_function(args.function))
    if name == "bv":
        secret = args.secret if args.secret is not None else "1" * size
        if n is not None and args.secret is not None:
            secret = (args.secret * size)[:size]
        return zoo.bernstein_vazirani(size, secret)
    if name == "grover":
        marked = parse_int_list(args.marked) if args.marked else [0]
        return zoo.grover(size, marked, form=args.form)
    if name == "ising":
        return zoo.ising_counterexample(size)
    if name == "kclique":
        if args.k is None:
            raise UsageError("kclique needs --k")
        return zoo.kclique(load_graph(args, n), args.k, deformed=args.deformed)
    raise UsageError(f"unknown problem {name!r}")


def overlap_for(p: zoo.Problem) -> float:
    """``C1`` for the bound: the closed-form target when known, else the ground-space weight."""
    if p.phi1 is not None:
        from .quantum_core import overlap_sq

        return overlap_sq(p.phi1, p.phi0)
    return ground_overlap(p)


def lambda_bar(args) -> float:
    if args.lambda_bar is not None:
        return args.lambda_bar
    if args.schedule is not None:
        return parse_schedule(args.schedule, 1.0).shape_average
    return 1.0


# ---------------------------------------------------------------- commands


def cmd_bound(args) -> tuple[dict, str | None, int]:
    p = build_problem(args)
    lb = lambda_bar(args)
    result: dict = {}
    code = EXIT_OK
    invalid = False
    csv = None
    if args.scan:
        if args.problem == "kclique" and args.file:
            raise UsageError("--scan needs a generated family, not --file")
        n_values = parse_int_list(args.n_values) if args.n_values else _default_scan(args)
        scan = asymptotic_scan(lambda m: build_problem(args, m), n_values)
        invalid = scan.classification == ASYMPTOTICALLY_INVALID
        result["scan"] = scan.to_dict()
        csv = scan.to_csv()
        if invalid:
            code = EXIT_INVALID
    report = compute_bound(p, args.epsilon, lb, overlap_c1=overlap_for(p), asymptotically_invalid=invalid)
    result["report"] = report.to_dict()
    if csv is None:
        csv = _dict_csv(report.to_dict())
    return result, csv, code


def _default_scan(args) -> list[int]:
    lo = {"ising": 3, "kclique": max(args.k or 2, 2)}.get(args.problem, 1)
    hi = args.n
    values = list(range(max(lo, hi - 5), hi + 1))
    if len(values) < 3:
        raise UsageError(f"--scan needs at least 3 sizes up to --n={hi}; pass --n-values")
    return values


def _dict_csv(d: dict) -> str:
    flat = {k: v for k, v in d.items() if not isinstance(v, (dict, list))}
    keys = list(flat)

    def fmt(v):
        if isinstance(v, float):
            return f"{v:.17g}"
        return "" if v is None else str(v)

    return ",".join(keys) + "\n" + ",".join(fmt(flat[k]) for k in keys) + "\n"


def cmd_simulate(args) -> tuple[dict, str | None, int]:
    p = build_problem(args)
    if p.h0 is None:
        raise UsageError(f"{p.name} has no driver Hamiltonian and cannot be simulated")
    sched = parse_schedule(args.schedule or "linear", args.T)
    traj = integrate(p, sched, steps=args.steps, samples=args.samples)
    if args.inject_fault:
        # push F by 0.2 away from C where the left inequality is tightest
        fid = traj.fidelity.copy()
        i = int(np.argmin(traj.chain_slacks()[0]))
        fid[i] += 0.2 if fid[i] >= traj.overlap[i] else -0.2
        traj = dataclasses.replace(traj, fidelity=fid)
    csv = traj.to_csv()
    if args.csv:
        Path(args.csv).write_text(csv)
    result = {
        "problem": p.name,
        "params": p.meta,
        "schedule": sched.to_dict(),
        "steps": traj.steps,
        "samples": int(traj.t.size),
        "finalFidelity": traj.final_fidelity,
        "finalR": float(traj.R[-1]),
        "normDrift": traj.norm_drift,
        "faultInjected": bool(args.inject_fault),
    }
    code = EXIT_OK
    try:
        result["chain"] = {"status": "pass", **verify_chain(traj).to_dict()}
    except PropertyViolation as exc:
        result["chain"] = {"status": "violation", "message": str(exc)}
        code = EXIT_VIOLATION
    return result, csv, code


def cmd_gap(args) -> tuple[dict, str | None, int]:
    p = build_problem(args)
    if p.h0 is None:
        raise UsageError(f"{p.name} has no driver Hamiltonian; no gap to sweep")
    profile = sweep(p, grid_size=args.grid)
    if args.csv:
        Path(args.csv).write_text(profile.to_csv())
    report = compute_bound(p, args.epsilon, lambda_bar(args), overlap_c1=overlap_for(p))
    result = {"problem": p.name, "params": p.meta, "gMin": profile.gMin, "argMin": profile.argMin}
    code = EXIT_OK
    try:
        result["projectorCheck"] = projector_case_check(p, profile).to_dict()
        result["comparison"] = compare_bounds(p, profile, report)
    except PropertyViolation as exc:
        result["violation"] = str(exc)
        code = EXIT_VIOLATION
    return result, profile.to_csv(), code


def cmd_kclique(args) -> tuple[dict, str | None, int]:
    if args.k is None:
        raise UsageError("kclique needs --k")
    args.problem = "kclique"
    g = load_graph(args)
    k = args.k
    p = zoo.kclique(g, k, deformed=args.deformed)
    M = count_kcliques(g, k)
    report = compute_bound(p, args.epsilon, lambda_bar(args), overlap_c1=overlap_for(p))
    result: dict = {
        "graph": {"source": args.file or "random", "n": g.n, "edges": g.edge_count, "M": M},
        "instance": report.to_dict(),
        "expectedDeformedMean": 1 - M / comb(g.n, k),
    }
    mf = kclique_meanfield(g.n, k, args.p)
    result["meanField"] = dataclasses.asdict(mf)
    result["combinatorial"] = dataclasses.asdict(kclique_combinatorial(g.n, k, args.p))
    if args.trials > 0:
        mc = kclique_montecarlo(g.n, k, args.p, effective_seed(args), args.trials, jobs=args.jobs)
        z = []
        for sample, err, want in ((mc.sampleMeanH, mc.stderrH, mf.eH), (mc.sampleMeanH2, mc.stderrH2, mf.eH2)):
            z.append(abs(sample - want) / err if err > 0 else (0.0 if sample == want else math.inf))
        result["monteCarlo"] = {
            **dataclasses.asdict(mc),
            "zH": z[0],
            "zH2": z[1],
            "withinThreeSigma": bool(max(z) <= 3.0),
        }
    return result, _dict_csv(report.to_dict()), EXIT_OK


def cmd_verify(args) -> tuple[dict, str | None, int]:
    checks = run_suite(args.suite)
    failed = [c for c in checks if not c.passed]
    result = {
        "suite": args.suite,
        "total": len(checks),
        "failed": len(failed),
        "checks": [c.to_dict() for c in checks],
    }
    lines = ["name,passed,detail"] + [f'"{c.name}",{c.passed},"{c.detail}"' for c in checks]
    return result, "\n".join(lines) + "\n", EXIT_VIOLATION if failed else EXIT_OK


COMMANDS = {
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "gap": cmd_gap,
    "kclique": cmd_kclique,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- wiring


def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("output")
    g.add_argument("--output", "-o", help="write to this file instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-stable output")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for Monte Carlo trials")
    g.add_argument("--seed", type=int, default=0, help=f"base seed (the {SEED_ENV} variable overrides it)")
    g.add_argument("--epsilon", type=float, default=0.1)
    g.add_argument("--lambda-bar", type=float, default=None)
    g.add_argument("--schedule", default=None, help="linear or power:q")


def _problem_options(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("problem")
    g.add_argument("--n", type=int, help="qubits, or vertices for kclique")
    g.add_argument("--marked", help="comma separated marked labels (grover)")
    g.add_argument("--form", choices=("diagonal", "projector"), default="diagonal")
    g.add_argument("--function", default="constant0", help="constant0, constant1 or balanced[:v]")
    g.add_argument("--secret", help="bit string for bv (default all ones)")
    g.add_argument("--k", type=int)
    g.add_argument("--p", type=float, default=0.5, help="edge probability")
    g.add_argument("--file", help="edge-list file for kclique")
    g.add_argument("--random", action="store_true", help="random graph for kclique")
    g.add_argument("--deformed", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aqabound", description="Runtime lower bounds for adiabatic algorithms.")
    parser.add_argument("--version", action="version", version=f"aqabound {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="uncertainty-based runtime bound")
    b.add_argument("problem", choices=PROBLEMS)
    _problem_options(b)
    b.add_argument("--scan", action="store_true", help="classify the family over several sizes")
    b.add_argument("--n-values", help="sizes for --scan, e.g. 3-9 or 3,5,7")
    _common(b)

    s = sub.add_parser("simulate", help="integrate a run and check the inequality chain")
    s.add_argument("problem", choices=PROBLEMS)
    _problem_options(s)
    s.add_argument("--T", type=float, default=10.0)
    s.add_argument("--steps", type=int, default=None)
    s.add_argument("--samples", type=int, default=201)
    s.add_argument("--csv", help="also write the trajectory CSV here")
    s.add_argument("--inject-fault", action="store_true", help="corrupt one fidelity sample (self-test)")
    _common(s)

    g = sub.add_parser("gap", help="spectral gap sweep")
    g.add_argument("problem", choices=PROBLEMS)
    _problem_options(g)
    g.add_argument("--grid", type=int, default=101)
    g.add_argument("--csv", help="also write the gap profile CSV here")
    _common(g)

    k = sub.add_parser("kclique", help="k-clique instance plus randomized estimators")
    _problem_options(k)
    k.add_argument("--trials", type=int, default=1000)
    _common(k)

    v = sub.add_parser("verify", help="run a built-in self-check suite")
    v.add_argument("suite", choices=(*SUITES, "all"))
    _common(v)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output", "format", "no_timestamp")}
    if "seed" in cfg:
        try:
            cfg["seed"] = effective_seed(args)
        except UsageError:
            pass
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, csv, code = COMMANDS[args.command](args)
    except (UsageError, GraphParseError, SizeCapError, ValueError) as exc:
        print(f"aqabound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PropertyViolation as exc:
        print(f"aqabound: property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    if args.format == "csv" and csv is not None:
        text = csv
    else:
        doc = {
            "tool": "aqabound",
            "version": __version__,
            "prng": PRNG_ID,
            "command": args.command,
            "config": _config(args),
            "result": result,
        }
        if not args.no_timestamp:
            doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        text = json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
