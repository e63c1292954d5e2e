"""Spectral-gap sweeps of ``H(lam)`` and their relation to the uncertainty bound."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .algorithms import MAX_DENSE_QUBITS, Problem
from .bounds import BoundReport
from .errors import PropertyViolation, SizeCapError
from .quantum_core import (
    ConvexPair,
    DiagonalOperator,
    ProjectorComplement,
    StateVector,
    low_spectrum,
    overlap_sq,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class GapProfile:
    lambdas: np.ndarray
    gaps: np.ndarray
    gMin: float
    argMin: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("lambda,gap\n")
        for lam, g in zip(self.lambdas, self.gaps):
            buf.write(f"{lam:.17g},{g:.17g}\n")
        return buf.getvalue()


def gap_at(p: Problem, lam: float) -> float:
    """``E1 - E0`` of ``H(lam)``, clamped at 0 against roundoff."""
    e = low_spectrum(ConvexPair(p.h0, p.h1, float(lam)), 2)
    if e.size < 2:
        return 0.0
    return max(float(e[1] - e[0]), 0.0)


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def sweep(p: Problem, grid_size: int = 101, refine: bool = True, xtol: float = 1e-6) -> GapProfile:
    """Gap on a uniform ``lam`` grid, refined by golden section around the grid minimum.

    ``gMin`` is never larger than the smallest grid sample.
    """
    if grid_size < 11:
        raise ValueError("gap sweep needs at least 11 grid points")
    if p.h0 is None:
        raise ValueError(f"{p.name} has no driver Hamiltonian")
    if p.basis.dim > 2**MAX_DENSE_QUBITS:
        raise SizeCapError(f"dimension {p.basis.dim} exceeds the dense cap")
    lambdas = np.linspace(0.0, 1.0, grid_size)
    gaps = np.array([gap_at(p, lam) for lam in lambdas])
    i = int(np.argmin(gaps))
    g_min, arg_min = float(gaps[i]), float(lambdas[i])
    if refine:
        a, b = lambdas[max(i - 1, 0)], lambdas[min(i + 1, grid_size - 1)]
        x, fx = _golden_min(lambda lam: gap_at(p, lam), a, b, xtol)
        if fx < g_min:
            g_min, arg_min = fx, x
    return GapProfile(lambdas, gaps, g_min, arg_min)


def two_level_gap(c1: float, lam):
    """Gap of ``I - (1-lam)|phi0><phi0| - lam|phi1><phi1|`` with ``|<phi1|phi0>|^2 = c1``.

    Restricted to the span of the two states the eigenvalues are
    ``(1 +- g)/2`` with ``g = sqrt(1 - 4 (1 - c1) lam (1 - lam))``; everything
    orthogonal sits at 1, so the gap is ``g``.
    """
    lam = np.asarray(lam, dtype=float)
    return np.sqrt(1.0 - 4.0 * (1.0 - c1) * lam * (1.0 - lam))


def projector_target(op) -> StateVector | None:
    """``t`` if ``op == I - |t><t|``, else None.

    Besides :class:`ProjectorComplement` this recognizes 0/1 diagonals with a
    single zero, e.g. single-item Grover.
    """
    if isinstance(op, ProjectorComplement):
        return op.target
    if isinstance(op, DiagonalOperator):
        zeros = np.flatnonzero(op.values == 0.0)
        if zeros.size == 1 and np.all((op.values == 0.0) | (op.values == 1.0)):
            return StateVector.basis_state(op.basis, int(zeros[0]))
    return None


def is_projector_pair(p: Problem) -> bool:
    return p.h0 is not None and projector_target(p.h0) is not None and projector_target(p.h1) is not None


@dataclass(frozen=True)
class ProjectorCheck:
    applicable: bool
    overlap: float | None = None
    min_slack: float | None = None
    gmin_error: float | None = None

    def to_dict(self) -> dict:
        if not self.applicable:
            return {"applicable": False, "status": "not-applicable"}
        return {
            "applicable": True,
            "status": "pass",
            "overlap": self.overlap,
            "min_slack": self.min_slack,
            "gmin_error": self.gmin_error,
        }


def projector_case_check(p: Problem, profile: GapProfile, tol: float = 1e-10, gmin_tol: float = 1e-6) -> ProjectorCheck:
    """For ``h0 = I - |phi0><phi0|, h1 = I - |phi1><phi1|``: gap >= |<phi1|phi0>| and equality at the minimum.

    Other problems get a not-applicable result.
    """
    if not is_projector_pair(p):
        return ProjectorCheck(False)
    ov = math.sqrt(overlap_sq(projector_target(p.h1), projector_target(p.h0)))
    slack = profile.gaps - ov
    if np.any(slack < -tol):
        i = int(np.argmin(slack))
        raise PropertyViolation(
            f"gap {profile.gaps[i]:.12g} below overlap {ov:.12g} at lambda={profile.lambdas[i]:.6g}"
        )
    err = abs(profile.gMin - ov)
    if err > gmin_tol:
        raise PropertyViolation(f"minimal gap {profile.gMin:.12g} differs from overlap {ov:.12g}")
    return ProjectorCheck(True, ov, float(slack.min()), err)


def compare_bounds(p: Problem, profile: GapProfile, report: BoundReport) -> dict:
    """Gap-based runtime scales next to the uncertainty bound.

    Always asserts ``tLower <= (pi/2) / (lambdaBar * deltaV)``; for projector
    pairs also reports the residual of ``deltaV = gMin * sqrt(1 - gMin^2)``.
    """
    out = {
        "problem": p.name,
        "gMin": profile.gMin,
        "argMin": profile.argMin,
        "deltaV": report.deltaV,
        "tLower": report.tLower,
        "degenerate": False,
    }
    if profile.gMin <= 0.0 or report.deltaV <= 0.0:
        out.update(degenerate=True, invGMin=None, invGMin2=None, tLowerTimesGMin=None)
        return out
    ceiling = (math.pi / 2) / (report.lambdaBar * report.deltaV)
    if report.tLower > ceiling * (1 + 1e-12):
        raise PropertyViolation(f"tLower {report.tLower} exceeds (pi/2)/(lambdaBar*deltaV) = {ceiling}")
    out.update(
        invGMin=1.0 / profile.gMin,
        invGMin2=1.0 / profile.gMin**2,
        tLowerTimesGMin=report.tLower * profile.gMin,
        tLowerCeiling=ceiling,
    )
    if is_projector_pair(p):
        g = profile.gMin
        out["gapUncertaintyResidual"] = abs(report.deltaV - g * math.sqrt(max(1.0 - g * g, 0.0)))
    return out
