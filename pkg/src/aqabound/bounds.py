"""Runtime lower bounds from the uncertainty of the final Hamiltonian.

For an interpolation ``H = (1 - lam) h0 + lam h1`` started in ``phi0``, a run
of length ``T`` that ends with infidelity at most ``epsilon`` must satisfy::

    T >= arcsin(max(1 - epsilon - C1, 0)) / (lambda_bar * deltaV)

with ``C1 = |<phi1|phi0>|^2``, ``deltaV`` the standard deviation of ``h1`` in
``phi0`` and ``lambda_bar`` the time average of the schedule.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np

from .algorithms import Problem
from .graph_tools import PRNG_ID, SubspaceIndex, random_graph
from .quantum_core import ground_space, moments, overlap_sq, variance_to_uncertainty

DEGENERATE_DELTA_V = 1e-14
MOMENTS_TOL = 1e-10
INVALID_SLOPE = -0.25

VALID = "Valid"
DEGENERATE = "Degenerate"
ASYMPTOTICALLY_INVALID = "AsymptoticallyInvalid"


@dataclass(frozen=True)
class BoundReport:
    problem: str
    params: dict
    mean1: float
    mean2: float
    deltaV: float
    momentsResidual: float
    overlapC1: float | None
    epsilon: float
    lambdaBar: float
    tLower: float
    asymptoticClass: str

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def final_moments(p: Problem) -> tuple[float, float]:
    """``(<h1>_0, <h1^2>_0)`` in the initial state."""
    return moments(p.h1, p.phi0)


def delta_v(p: Problem) -> float:
    return variance_to_uncertainty(*final_moments(p))


def ground_overlap(p: Problem) -> float:
    """Weight of ``phi0`` in the ground space of ``h1``.

    This is the largest value ``|<phi1|phi0>|^2`` can take over ground states
    ``phi1``, so it is a valid ``C1`` for problems without a closed-form target.
    """
    _, space = ground_space(p.h1)
    return float(np.linalg.norm(space.conj().T @ p.phi0.amps) ** 2)


def arcsin_bound(epsilon: float, c1: float, lambda_bar: float, dv: float) -> float:
    """Evaluate the runtime bound; 0 when the numerator or ``dv`` vanishes."""
    numerator = math.asin(min(max(1.0 - epsilon - c1, 0.0), 1.0))
    if numerator == 0.0 or dv < DEGENERATE_DELTA_V:
        return 0.0
    return numerator / (lambda_bar * dv)


def compute_bound(
    p: Problem,
    epsilon: float = 0.1,
    lambda_bar: float = 1.0,
    overlap_c1: float | None = None,
    asymptotically_invalid: bool = False,
) -> BoundReport:
    """Bound report for ``p``.

    ``overlap_c1`` overrides ``|<phi1|phi0>|^2`` and is required when ``p``
    has no ``phi1``.  ``asymptotically_invalid`` is set by callers that have
    scanned the problem family (see :func:`asymptotic_scan`).
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if not 0.0 < lambda_bar <= 1.0:
        raise ValueError(f"lambda_bar must lie in (0, 1], got {lambda_bar}")
    if overlap_c1 is None:
        if p.phi1 is None:
            raise ValueError(f"{p.name}: no target state; supply overlap_c1")
        overlap_c1 = overlap_sq(p.phi1, p.phi0)
    mean1, mean2 = final_moments(p)
    dv = variance_to_uncertainty(mean1, mean2)
    if dv < DEGENERATE_DELTA_V:
        cls = DEGENERATE
    elif asymptotically_invalid:
        cls = ASYMPTOTICALLY_INVALID
    else:
        cls = VALID
    return BoundReport(
        problem=p.name,
        params=dict(p.meta),
        mean1=mean1,
        mean2=mean2,
        deltaV=dv,
        momentsResidual=abs(mean2 - mean1),
        overlapC1=float(overlap_c1),
        epsilon=float(epsilon),
        lambdaBar=float(lambda_bar),
        tLower=arcsin_bound(epsilon, overlap_c1, lambda_bar, dv),
        asymptoticClass=cls,
    )


def moments_check(p: Problem, tol: float = MOMENTS_TOL) -> tuple[bool, float]:
    """Whether ``<h1^2>_0 == <h1>_0``, and the residual."""
    mean1, mean2 = final_moments(p)
    residual = abs(mean2 - mean1)
    return residual < tol, residual


@dataclass(frozen=True)
class ScanRow:
    n: int
    deltaV: float
    invDeltaV: float
    cls: str


@dataclass(frozen=True)
class ScanResult:
    rows: list[ScanRow]
    slope: float
    classification: str

    def to_csv(self) -> str:
        lines = ["n,deltaV,invDeltaV,class"]
        lines += [f"{r.n},{r.deltaV:.17g},{r.invDeltaV:.17g},{r.cls}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "rows": [asdict(r) for r in self.rows],
            "slope": self.slope,
            "classification": self.classification,
        }


def asymptotic_scan(family: Callable[[int], Problem], n_values: Sequence[int]) -> ScanResult:
    """Tabulate ``deltaV`` over a family and classify its large-n trend.

    The family is flagged asymptotically invalid when the least-squares slope
    of ``log(1/deltaV)`` against ``log n`` is below -0.25, i.e. the inverse
    uncertainty is heading to zero.  Degenerate members (``deltaV == 0``) are
    excluded from the fit.
    """
    n_values = list(n_values)
    if len(n_values) < 3:
        raise ValueError("asymptotic scan needs at least 3 sizes")
    raw = []
    for n in n_values:
        try:
            dv = delta_v(family(n))
        except Exception as exc:
            raise RuntimeError(f"problem generator failed at n={n}: {exc}") from exc
        raw.append((n, dv))
    fit = [(n, dv) for n, dv in raw if dv >= DEGENERATE_DELTA_V]
    if len(fit) >= 2:
        x = np.log([n for n, _ in fit])
        y = -np.log([dv for _, dv in fit])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = float("nan")
    if len(fit) < 2:
        family_cls = DEGENERATE
    elif slope < INVALID_SLOPE:
        family_cls = ASYMPTOTICALLY_INVALID
    else:
        family_cls = VALID
    rows = []
    for n, dv in raw:
        if dv < DEGENERATE_DELTA_V:
            rows.append(ScanRow(n, dv, float("inf"), DEGENERATE))
        else:
            rows.append(ScanRow(n, dv, 1.0 / dv, family_cls))
    return ScanResult(rows, slope, family_cls)


@dataclass(frozen=True)
class RandomCliqueMoments:
    eH: float
    eH2: float
    deltaVrand: float
    tRandInf: float


def _check_clique_params(n: int, k: int, p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"edge probability must lie strictly inside (0, 1), got {p}")
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got n={n}, k={k}")


def _moments_to_result(eh: float, eh2: float) -> RandomCliqueMoments:
    dv = math.sqrt(max(eh2 - eh * eh, 0.0))
    return RandomCliqueMoments(eh, eh2, dv, 1.0 / dv)


def kclique_meanfield(n: int, k: int, p: float) -> RandomCliqueMoments:
    """Expected cost moments over G(n, p), edge indicators replaced by expectations.

    Pair sums over a weight-k string contribute ``L = C(k,2)`` terms;
    ``E[G_ij G_i'j'] = p`` on the diagonal and ``p^2`` off it.
    """
    _check_clique_params(n, k, p)
    L = comb(k, 2)
    eh = L - p * L
    pair_term = L * p + (L * L - L) * p * p
    eh2 = L * L - 2 * p * L * L + pair_term
    return _moments_to_result(eh, eh2)


def clique_multiplicities(n: int, k: int, p: float) -> np.ndarray:
    """Expected number of weight-k strings with cost ``alpha``, for ``alpha = 0..C(k,2)``."""
    L = comb(k, 2)
    return np.array(
        [p ** (L - a) * (1 - p) ** a * comb(L, a) * comb(n, k) for a in range(L + 1)]
    )


def kclique_combinatorial(n: int, k: int, p: float) -> RandomCliqueMoments:
    """Expected cost moments by explicit summation over cost multiplicities."""
    _check_clique_params(n, k, p)
    m = clique_multiplicities(n, k, p)
    alpha = np.arange(m.size)
    total = comb(n, k)
    return _moments_to_result(float(m @ alpha) / total, float(m @ alpha**2) / total)


@dataclass(frozen=True)
class MonteCarloResult:
    sampleMeanH: float
    sampleMeanH2: float
    stderrH: float
    stderrH2: float
    trials: int
    seed: int
    prng: str = PRNG_ID


def _trial_moments(n: int, k: int, p: float, seeds: Sequence[int]) -> np.ndarray:
    z = SubspaceIndex(n, k).bits
    ii, jj = np.tril_indices(n, -1)
    # pair membership of every weight-k string, one column per vertex pair
    pairs = z[:, ii] * z[:, jj]
    out = np.empty((len(seeds), 2))
    for t, seed in enumerate(seeds):
        g = random_graph(n, p, seed)
        h = pairs @ (~g.adjacency[ii, jj]).astype(np.int64)
        out[t] = h.mean(), (h * h).mean()
    return out


def kclique_montecarlo(
    n: int, k: int, p: float, seed: int, trials: int, jobs: int = 1
) -> MonteCarloResult:
    """Average ``h_C`` and ``h_C^2`` over seeded random graphs.

    Trial ``t`` uses the graph from seed ``seed + t``, so the result does not
    depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    seeds = [seed + t for t in range(trials)]
    if jobs > 1:
        chunks = [seeds[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_trial_moments, [n] * jobs, [k] * jobs, [p] * jobs, chunks))
        data = np.empty((trials, 2))
        for i, part in enumerate(parts):
            data[i::jobs] = part
    else:
        data = _trial_moments(n, k, p, seeds)
    means = data.mean(axis=0)
    if trials > 1:
        errs = data.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        errs = np.zeros(2)
    return MonteCarloResult(
        float(means[0]), float(means[1]), float(errs[0]), float(errs[1]), trials, seed
    )
