"""Time evolution under ``H(t) = (1 - lam(t)) h0 + lam(t) h1``.

Integration is fixed-step classical RK4 in physical time with renormalization
after every step.  Samples along the way record the adiabatic fidelity ``F``,
the ground-state overlap ``C``, the Bures angle ``theta`` from the initial
state, and ``R``, the time integral of the energy uncertainty in the initial
state, so the chain ``|F - C| <= sin(theta) <= sin(min(R, pi/2))`` can be
checked sample by sample.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
from scipy.interpolate import PchipInterpolator

from .algorithms import Problem
from .bounds import compute_bound
from .errors import IntegrationQualityError, PropertyViolation
from .quantum_core import ConvexPair, StateVector, angle_between, ground_state

CHAIN_TOL = 1e-8
MAX_NORM_DRIFT = 1e-6
STEPS_PER_UNIT = 2000
SEARCH_STEPS_PER_UNIT = 200
MIN_STEPS = 100
DENSE_FAST_PATH = 256


@dataclass(frozen=True, eq=False)
class Schedule:
    """``lam(t) = f(t / T)`` for a strictly increasing ``f`` with ``f(0)=0, f(1)=1``.

    ``shape`` is ``"linear"``, ``"power"`` (``f(s) = s**exponent``) or
    ``"table"`` (monotone samples ``(s_i, f_i)``, interpolated with PCHIP).
    """

    shape: str
    T: float
    exponent: float = 1.0
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"total time must be positive, got {self.T}")
        if self.shape == "power" and not self.exponent > 0:
            raise ValueError("power schedule needs a positive exponent")
        if self.shape == "table":
            if self.table is None:
                raise ValueError("table schedule needs samples")
            s, f = (np.asarray(a, dtype=float) for a in self.table)
            if s.shape != f.shape or s.size < 2:
                raise ValueError("table needs matching sample arrays of length >= 2")
            if s[0] != 0 or s[-1] != 1 or f[0] != 0 or f[-1] != 1:
                raise ValueError("table must run from (0, 0) to (1, 1)")
            if np.any(np.diff(s) <= 0) or np.any(np.diff(f) <= 0):
                raise ValueError("table samples must be strictly increasing")
        elif self.shape not in ("linear", "power"):
            raise ValueError(f"unknown schedule shape {self.shape!r}")

    @classmethod
    def linear(cls, T: float) -> Schedule:
        return cls("linear", T)

    @classmethod
    def power(cls, T: float, exponent: float) -> Schedule:
        return cls("power", T, exponent=exponent)

    @classmethod
    def from_table(cls, T: float, s: Sequence[float], f: Sequence[float]) -> Schedule:
        return cls("table", T, table=(tuple(map(float, s)), tuple(map(float, f))))

    def with_time(self, T: float) -> Schedule:
        return replace(self, T=T)

    def _interp(self) -> PchipInterpolator:
        return PchipInterpolator(*(np.asarray(a, dtype=float) for a in self.table))

    def shape_fn(self, s):
        """``f(s)`` on ``[0, 1]``."""
        s = np.clip(s, 0.0, 1.0)
        if self.shape == "linear":
            return s
        if self.shape == "power":
            return s**self.exponent
        return self._interp()(s)

    def shape_derivative(self, s):
        s = np.clip(s, 0.0, 1.0)
        if self.shape == "linear":
            return np.ones_like(s)
        if self.shape == "power":
            return self.exponent * s ** (self.exponent - 1)
        return self._interp().derivative()(s)

    def lam(self, t):
        return self.shape_fn(np.asarray(t, dtype=float) / self.T)

    def rate(self, t):
        """Driving rate ``d lam / dt``."""
        return self.shape_derivative(np.asarray(t, dtype=float) / self.T) / self.T

    @property
    def shape_average(self) -> float:
        """``integral_0^1 f(s) ds``, i.e. the time average of ``lam`` over a run."""
        if self.shape == "linear":
            return 0.5
        if self.shape == "power":
            return 1.0 / (self.exponent + 1.0)
        val, _ = scipy.integrate.quad(self.shape_fn, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
        return float(val)

    def to_dict(self) -> dict:
        d = {"shape": self.shape, "T": self.T}
        if self.shape == "power":
            d["exponent"] = self.exponent
        if self.shape == "table":
            d["table"] = [list(self.table[0]), list(self.table[1])]
        return d


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples of one run; arrays are aligned, one entry per sample."""

    t: np.ndarray
    lam: np.ndarray
    psi: list[StateVector]
    fidelity: np.ndarray
    overlap: np.ndarray
    theta: np.ndarray
    R: np.ndarray
    norm_drift: float
    problem: Problem = field(repr=False)
    schedule: Schedule = field(repr=False)
    steps: int = 0

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    def chain_slacks(self) -> tuple[np.ndarray, np.ndarray]:
        """``sin(theta) - |F - C|`` and ``sin(R~) - sin(theta)`` per sample."""
        sin_theta = np.sin(self.theta)
        left = sin_theta - np.abs(self.fidelity - self.overlap)
        right = np.sin(np.minimum(self.R, np.pi / 2)) - sin_theta
        return left, right

    def to_csv(self) -> str:
        left, right = self.chain_slacks()
        buf = io.StringIO()
        buf.write("t,lambda,fidelity,overlapC,bures,R,sinR_clamped,chain_slack_left,chain_slack_right\n")
        sin_r = np.sin(np.minimum(self.R, np.pi / 2))
        for row in zip(self.t, self.lam, self.fidelity, self.overlap, self.theta, self.R, sin_r, left, right):
            buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()


class _Evolution:
    """Precomputed pieces for propagating one problem."""

    def __init__(self, p: Problem):
        if p.h0 is None:
            raise ValueError(f"{p.name} has no driver Hamiltonian; it cannot be evolved")
        self.p = p
        self.h0 = p.h0
        self.h1 = p.h1
        self.scale = max(p.h0.norm_bound(), p.h1.norm_bound(), 1e-300)
        self.dim = p.basis.dim
        self._stacked = None
        if self.dim <= DENSE_FAST_PATH:
            h0 = p.h0.to_dense()
            self._stacked = np.vstack([-1j * h0, -1j * (p.h1.to_dense() - h0)])
        a = self.h0.apply(p.phi0.amps)
        b = self.h1.apply(p.phi0.amps)
        phi = p.phi0.amps
        # Gram data for the uncertainty of H(lam) in phi0
        self._aa = float(np.vdot(a, a).real)
        self._bb = float(np.vdot(b, b).real)
        self._ab = float(np.vdot(a, b).real)
        self._ea = float(np.vdot(phi, a).real)
        self._eb = float(np.vdot(phi, b).real)

    def initial_uncertainty(self, lam):
        """``sqrt(<H(lam)^2>_0 - <H(lam)>_0^2)``, vectorized over ``lam``."""
        lam = np.asarray(lam, dtype=float)
        u = 1.0 - lam
        second = u * u * self._aa + 2 * u * lam * self._ab + lam * lam * self._bb
        first = u * self._ea + lam * self._eb
        return np.sqrt(np.maximum(second - first * first, 0.0))

    def rhs(self, lam: float, v: np.ndarray) -> np.ndarray:
        if self._stacked is not None:
            w = self._stacked @ v
            return w[: self.dim] + lam * w[self.dim :]
        a = self.h0.apply(v)
        return -1j * (a + lam * (self.h1.apply(v) - a))

    def default_steps(self, T: float, per_unit: float) -> int:
        return max(MIN_STEPS, int(math.ceil(per_unit * T * self.scale)))


def _propagate(ev: _Evolution, sched: Schedule, steps: int, samples: int | None):
    """RK4 from ``phi0``; yields ``(step_index, t, psi)`` at sample points."""
    T = sched.T
    h = T / steps
    psi = ev.p.phi0.amps.copy()
    drift = 0.0
    if samples is None:
        sample_at = {steps}
    else:
        sample_at = set(np.unique(np.round(np.linspace(0, steps, samples)).astype(int)).tolist())
    # R = integral of the initial-state uncertainty over t, Simpson per step
    tt = np.linspace(0.0, T, 2 * steps + 1)
    g = ev.initial_uncertainty(sched.lam(tt))
    r_cum = np.concatenate([[0.0], np.cumsum(h / 6 * (g[0:-1:2] + 4 * g[1::2] + g[2::2]))])
    lam_grid = sched.lam(tt)
    out = []
    if 0 in sample_at:
        out.append((0, 0.0, psi.copy()))
    for i in range(steps):
        l0, lm, l1 = lam_grid[2 * i], lam_grid[2 * i + 1], lam_grid[2 * i + 2]
        k1 = ev.rhs(l0, psi)
        k2 = ev.rhs(lm, psi + 0.5 * h * k1)
        k3 = ev.rhs(lm, psi + 0.5 * h * k2)
        k4 = ev.rhs(l1, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        norm = np.linalg.norm(psi)
        drift += abs(norm - 1.0)
        psi /= norm
        if i + 1 in sample_at:
            out.append((i + 1, (i + 1) * h, psi.copy()))
    if drift > MAX_NORM_DRIFT:
        raise IntegrationQualityError(
            f"norm drift {drift:.3e} exceeds {MAX_NORM_DRIFT:.0e}; increase the step count"
        )
    return out, r_cum, drift


def _observables(p: Problem, lam: float, psi: StateVector) -> tuple[float, float]:
    """Adiabatic fidelity and ground-state overlap with ``phi0`` at ``lam``."""
    _, phi = ground_state(ConvexPair(p.h0, p.h1, float(lam)), reference=psi)
    f = abs(np.vdot(phi.amps, psi.amps)) ** 2
    c = abs(np.vdot(phi.amps, p.phi0.amps)) ** 2
    return float(f), float(c)


def integrate(
    p: Problem,
    schedule: Schedule,
    steps: int | None = None,
    samples: int = 201,
) -> Trajectory:
    """Evolve ``phi0`` through the schedule and sample the trajectory observables.

    ``steps`` defaults to 2000 per unit of ``T * ||H||``.  At each of the
    ``samples`` evenly spaced checkpoints the instantaneous ground state is
    computed; on a degenerate ground level the member closest to the evolved
    state is used, which maximizes the fidelity.
    """
    ev = _Evolution(p)
    if steps is None:
        steps = ev.default_steps(schedule.T, STEPS_PER_UNIT)
    if steps < MIN_STEPS:
        raise ValueError(f"need at least {MIN_STEPS} steps, got {steps}")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    recorded, r_cum, drift = _propagate(ev, schedule, steps, samples)
    t = np.array([x[1] for x in recorded])
    lam = np.asarray(schedule.lam(t), dtype=float)
    lam[-1] = 1.0
    psis = [StateVector.normalized(p.basis, x[2]) for x in recorded]
    fc = np.array([_observables(p, l, s) for l, s in zip(lam, psis)])
    theta = np.array([angle_between(s.amps, p.phi0.amps) for s in psis])
    R = r_cum[[x[0] for x in recorded]]
    return Trajectory(
        t=t,
        lam=lam,
        psi=psis,
        fidelity=fc[:, 0],
        overlap=fc[:, 1],
        theta=theta,
        R=R,
        norm_drift=drift,
        problem=p,
        schedule=schedule,
        steps=steps,
    )


def final_fidelity(p: Problem, schedule: Schedule, steps: int | None = None) -> float:
    """``F`` at the end of the run, without intermediate sampling."""
    ev = _Evolution(p)
    if steps is None:
        steps = ev.default_steps(schedule.T, SEARCH_STEPS_PER_UNIT)
    recorded, _, _ = _propagate(ev, schedule, max(steps, MIN_STEPS), None)
    psi = StateVector.normalized(p.basis, recorded[-1][2])
    return _observables(p, 1.0, psi)[0]


@dataclass(frozen=True)
class ChainReport:
    min_left: float
    lam_left: float
    min_right: float
    lam_right: float
    samples: int

    def to_dict(self) -> dict:
        return {
            "min_slack_left": self.min_left,
            "lambda_left": self.lam_left,
            "min_slack_right": self.min_right,
            "lambda_right": self.lam_right,
            "samples": self.samples,
        }


def verify_chain(traj: Trajectory, tol: float = CHAIN_TOL) -> ChainReport:
    """Check ``|F - C| <= sin(theta) <= sin(min(R, pi/2))`` at every sample.

    Returns the smallest slack of each inequality; raises
    :class:`PropertyViolation` naming the first offending sample otherwise.
    """
    left, right = traj.chain_slacks()
    for name, slack in (("|F-C| <= sin(theta)", left), ("sin(theta) <= sin(R~)", right)):
        bad = np.flatnonzero(slack < -tol)
        if bad.size:
            i = int(bad[0])
            raise PropertyViolation(
                f"{name} violated at sample {i} (t={traj.t[i]:.6g}, lambda={traj.lam[i]:.6g}): "
                f"slack {slack[i]:.3e}"
            )
    il, ir = int(np.argmin(left)), int(np.argmin(right))
    return ChainReport(float(left[il]), float(traj.lam[il]), float(right[ir]), float(traj.lam[ir]), left.size)


@dataclass(frozen=True)
class MinTimeResult:
    T_min: float
    converged: bool
    evaluations: int
    lower: float


def min_adiabatic_time(
    p: Problem,
    schedule: Schedule,
    epsilon: float,
    tol: float = 0.02,
    T_cap: float = 1e5,
    T_start: float = 0.5,
    steps_per_unit: float = SEARCH_STEPS_PER_UNIT,
) -> MinTimeResult:
    """Smallest ``T`` (to relative ``tol``) with ``1 - F(1) <= epsilon``.

    Only the shape of ``schedule`` is used.  ``T`` is doubled from ``T_start``
    until the condition holds, then bisected inside that bracket.  The final
    infidelity oscillates in ``T`` in general, so the result is the first
    crossing found this way rather than a certified minimum.  If the
    condition already holds for an instantaneous run the answer is 0.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    ev = _Evolution(p)
    evals = 0

    def ok(T: float) -> bool:
        nonlocal evals
        evals += 1
        sched = schedule.with_time(T)
        return 1.0 - final_fidelity(p, sched, ev.default_steps(T, steps_per_unit)) <= epsilon

    _, phi1 = ground_state(p.h1, reference=p.phi0)
    if 1.0 - abs(np.vdot(phi1.amps, p.phi0.amps)) ** 2 <= epsilon:
        return MinTimeResult(0.0, True, evals, 0.0)
    lo, hi = 0.0, T_start
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > T_cap:
            return MinTimeResult(lo, False, evals, lo)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return MinTimeResult(hi, True, evals, lo)


@dataclass(frozen=True)
class ScalingRow:
    n: int
    N: int
    T_min: float
    tLower: float
    converged: bool


@dataclass(frozen=True)
class ScalingResult:
    rows: list[ScalingRow]
    slope: float

    def to_dict(self) -> dict:
        return {"rows": [r.__dict__ for r in self.rows], "slope": self.slope}


def scaling_experiment(
    family: Callable[[int], Problem],
    n_values: Sequence[int],
    epsilon: float,
    schedule: Schedule,
    tol: float = 0.02,
) -> ScalingResult:
    """``T_min`` and the runtime bound per size, plus the log-log slope of ``T_min`` vs ``N``.

    ``N`` is the Hilbert-space dimension of each instance; the bound uses the
    schedule's own time average.
    """
    rows = []
    for n in n_values:
        p = family(n)
        res = min_adiabatic_time(p, schedule, epsilon, tol=tol)
        bound = compute_bound(p, epsilon, schedule.shape_average)
        rows.append(ScalingRow(n, p.basis.dim, res.T_min, bound.tLower, res.converged))
    pos = [(r.N, r.T_min) for r in rows if r.T_min > 0]
    slope = float(np.polyfit(np.log([a for a, _ in pos]), np.log([b for _, b in pos]), 1)[0]) if len(pos) >= 2 else float("nan")
    return ScalingResult(rows, slope)
