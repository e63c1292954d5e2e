"""State vectors, Hermitian operators, and the spectral primitives built on them.

Operators come in four representations that share one interface
(:meth:`Operator.apply`, :meth:`Operator.to_dense`): a dense matrix, a real
diagonal indexed by basis labels, the projector complement ``I - |t><t|``, and
the convex pair ``(1 - lam) h0 + lam h1``.  Everything is immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    EigensolverError,
    NonHermitianError,
    NumericIntegrityError,
)
from .graph_tools import SubspaceIndex

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
IMAG_TOL = 1e-10
CLAMP_TOL = 1e-10
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class BasisDescriptor:
    """Which Hilbert space a vector lives in.

    ``kind`` is ``"full"`` (all ``2**n`` labels), ``"hamming"`` (the
    ``C(n, k)`` labels of weight ``k``, colex order) or ``"tensor"`` (register
    A of ``n`` qubits times register B of ``nB`` qubits; index
    ``a * 2**nB + b``).
    """

    kind: str
    n: int
    k: int | None = None
    nB: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be nonnegative")
        if self.kind == "full":
            if self.k is not None or self.nB is not None:
                raise ValueError("full register takes only n")
        elif self.kind == "hamming":
            if self.k is None or not 0 <= self.k <= self.n:
                raise ValueError(f"hamming subspace needs 0 <= k <= n, got k={self.k}")
        elif self.kind == "tensor":
            if self.nB is None or self.nB < 0:
                raise ValueError("tensor basis needs nB >= 0")
        else:
            raise ValueError(f"unknown basis kind {self.kind!r}")

    @classmethod
    def full(cls, n: int) -> BasisDescriptor:
        return cls("full", n)

    @classmethod
    def hamming(cls, n: int, k: int) -> BasisDescriptor:
        return cls("hamming", n, k=k)

    @classmethod
    def tensor(cls, nA: int, nB: int) -> BasisDescriptor:
        return cls("tensor", nA, nB=nB)

    @property
    def dim(self) -> int:
        if self.kind == "full":
            return 2**self.n
        if self.kind == "hamming":
            return comb(self.n, self.k)
        return 2 ** (self.n + self.nB)

    @property
    def index(self) -> SubspaceIndex | None:
        return SubspaceIndex(self.n, self.k) if self.kind == "hamming" else None

    def labels(self) -> np.ndarray:
        """Bitstring label of every basis index."""
        if self.kind == "hamming":
            return np.asarray(self.index.labels)
        return np.arange(self.dim, dtype=np.int64)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "dim": self.dim}
        if self.k is not None:
            d["k"] = self.k
        if self.nB is not None:
            d["nB"] = self.nB
        return d

    @classmethod
    def from_dict(cls, d: dict) -> BasisDescriptor:
        return cls(d["kind"], d["n"], k=d.get("k"), nB=d.get("nB"))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: BasisDescriptor
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise DimensionError(f"expected {self.basis.dim} amplitudes, got shape {amps.shape}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NumericIntegrityError(f"state is not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amps", _readonly(amps))

    @classmethod
    def normalized(cls, basis: BasisDescriptor, amps) -> StateVector:
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NumericIntegrityError("cannot normalize the zero vector")
        return cls(basis, amps / norm)

    @classmethod
    def basis_state(cls, basis: BasisDescriptor, index: int) -> StateVector:
        amps = np.zeros(basis.dim, dtype=complex)
        amps[index] = 1.0
        return cls(basis, amps)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def to_dict(self) -> dict:
        return {"re": self.amps.real.tolist(), "im": self.amps.imag.tolist()}

    @classmethod
    def from_dict(cls, basis: BasisDescriptor, d: dict) -> StateVector:
        return cls(basis, np.asarray(d["re"]) + 1j * np.asarray(d["im"]))


class Operator:
    """Hermitian operator on a :class:`BasisDescriptor`."""

    basis: BasisDescriptor

    def apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_dense(self) -> np.ndarray:
        raise NotImplementedError

    def norm_bound(self) -> float:
        """An upper bound on the spectral norm."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(basis: BasisDescriptor, d: dict) -> Operator:
        rep = d["repr"]
        if rep == "dense":
            return DenseOperator(basis, np.asarray(d["re"]) + 1j * np.asarray(d["im"]))
        if rep == "diagonal":
            return DiagonalOperator(basis, d["values"])
        if rep == "projector_complement":
            return ProjectorComplement(StateVector.from_dict(basis, d["target"]))
        if rep == "convex_pair":
            return ConvexPair(
                Operator.from_dict(basis, d["h0"]), Operator.from_dict(basis, d["h1"]), d["lambda"]
            )
        raise ValueError(f"unknown operator representation {rep!r}")


@dataclass(frozen=True, eq=False)
class DenseOperator(Operator):
    basis: BasisDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.basis.dim
        if m.shape != (d, d):
            raise DimensionError(f"expected a {d}x{d} matrix, got {m.shape}")
        if d and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise NonHermitianError("matrix is not Hermitian")
        object.__setattr__(self, "matrix", _readonly(m))

    def apply(self, v):
        return self.matrix @ v

    def to_dense(self):
        return self.matrix

    def norm_bound(self):
        # max absolute row sum bounds the spectral norm
        return float(np.max(np.sum(np.abs(self.matrix), axis=1), initial=0.0))

    def to_dict(self):
        return {"repr": "dense", "re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}


@dataclass(frozen=True, eq=False)
class DiagonalOperator(Operator):
    """``sum_z h(z) |z><z|`` with ``values`` in basis-index order."""

    basis: BasisDescriptor
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals):
            if np.max(np.abs(vals.imag), initial=0.0) > HERMITIAN_TOL:
                raise NonHermitianError("diagonal entries must be real")
            vals = vals.real
        vals = np.array(vals, dtype=float)
        if vals.shape != (self.basis.dim,):
            raise DimensionError(f"expected {self.basis.dim} diagonal values, got {vals.shape}")
        object.__setattr__(self, "values", _readonly(vals))

    def apply(self, v):
        return self.values * v

    def to_dense(self):
        return np.diag(self.values).astype(complex)

    def norm_bound(self):
        return float(np.max(np.abs(self.values), initial=0.0))

    def to_dict(self):
        return {"repr": "diagonal", "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class ProjectorComplement(Operator):
    """``I - |target><target|``."""

    target: StateVector

    @property
    def basis(self):
        return self.target.basis

    def apply(self, v):
        t = self.target.amps
        return v - t * np.vdot(t, v)

    def to_dense(self):
        t = self.target.amps
        return np.eye(t.size, dtype=complex) - np.outer(t, t.conj())

    def norm_bound(self):
        return 1.0

    def to_dict(self):
        return {"repr": "projector_complement", "target": self.target.to_dict()}


@dataclass(frozen=True, eq=False)
class ConvexPair(Operator):
    """``(1 - lam) * h0 + lam * h1``, materialized only on request."""

    h0: Operator
    h1: Operator
    lam: float

    def __post_init__(self):
        if self.h0.basis != self.h1.basis:
            raise DimensionError(f"operands live on {self.h0.basis} and {self.h1.basis}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"interpolation parameter must lie in [0, 1], got {self.lam}")

    @property
    def basis(self):
        return self.h0.basis

    def apply(self, v):
        return (1.0 - self.lam) * self.h0.apply(v) + self.lam * self.h1.apply(v)

    def to_dense(self):
        return (1.0 - self.lam) * self.h0.to_dense() + self.lam * self.h1.to_dense()

    def norm_bound(self):
        return (1.0 - self.lam) * self.h0.norm_bound() + self.lam * self.h1.norm_bound()

    def to_dict(self):
        return {
            "repr": "convex_pair",
            "h0": self.h0.to_dict(),
            "h1": self.h1.to_dict(),
            "lambda": self.lam,
        }


def build_interpolated(h0: Operator, h1: Operator, lam: float) -> ConvexPair:
    return ConvexPair(h0, h1, float(lam))


def _check_basis(a, b) -> None:
    if a.basis != b.basis:
        raise DimensionError(f"basis mismatch: {a.basis} vs {b.basis}")


def expectation(op: Operator, psi: StateVector) -> float:
    _check_basis(op, psi)
    raw = np.vdot(psi.amps, op.apply(psi.amps))
    if abs(raw.imag) > IMAG_TOL:
        raise NumericIntegrityError(f"<psi|H|psi> has imaginary part {raw.imag!r}")
    return float(raw.real)


def moments(op: Operator, psi: StateVector) -> tuple[float, float]:
    """``(<H>, <H^2>)`` in ``psi``; ``<H^2>`` is ``||H psi||^2`` for Hermitian ``H``."""
    _check_basis(op, psi)
    hv = op.apply(psi.amps)
    raw = np.vdot(psi.amps, hv)
    if abs(raw.imag) > IMAG_TOL:
        raise NumericIntegrityError(f"<psi|H|psi> has imaginary part {raw.imag!r}")
    return float(raw.real), float(np.vdot(hv, hv).real)


def variance_to_uncertainty(mean: float, mean2: float) -> float:
    var = mean2 - mean * mean
    if var < -CLAMP_TOL:
        raise NumericIntegrityError(f"negative variance {var!r} beyond roundoff")
    return float(np.sqrt(max(var, 0.0)))


def uncertainty(op: Operator, psi: StateVector) -> float:
    """Standard deviation ``sqrt(<H^2> - <H>^2)`` of ``op`` in ``psi``."""
    return variance_to_uncertainty(*moments(op, psi))


def overlap_sq(a: StateVector, b: StateVector) -> float:
    _check_basis(a, b)
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """``arccos |<u|v>|`` for unit vectors, accurate down to tiny angles.

    Uses ``2 arcsin(|u - e^{ia} v| / 2)`` with the phase ``a`` aligning ``v``
    to ``u``; plain arccos loses everything below about 1.5e-8.
    """
    ov = np.vdot(v, u)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    d = float(np.linalg.norm(u - phase * v))
    return float(2.0 * np.arcsin(min(d / 2.0, 1.0 / math.sqrt(2.0))))


def bures_angle(a: StateVector, b: StateVector) -> float:
    """``arccos |<a|b>|``, in ``[0, pi/2]``."""
    _check_basis(a, b)
    return angle_between(a.amps, b.amps)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    i = int(np.argmax(np.abs(v)))
    if v[i] == 0:
        return v
    return v * (abs(v[i]) / v[i])


def _eigh(op: Operator) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(op, DiagonalOperator):
        order = np.argsort(op.values, kind="stable")
        vecs = np.zeros((op.basis.dim, op.basis.dim), dtype=complex)
        vecs[order, np.arange(order.size)] = 1.0
        return op.values[order], vecs
    m = op.to_dense()
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NonHermitianError("operator is not Hermitian")
    try:
        return scipy.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc


def low_spectrum(op: Operator, count: int = 2) -> np.ndarray:
    """The ``count`` smallest eigenvalues, ascending."""
    if isinstance(op, DiagonalOperator):
        return np.sort(op.values)[:count]
    m = op.to_dense()
    count = min(count, m.shape[0])
    try:
        return scipy.linalg.eigh(m, eigvals_only=True, subset_by_index=(0, count - 1))
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc


def ground_space(op: Operator, tol: float = DEGENERACY_TOL) -> tuple[float, np.ndarray]:
    """Ground energy and an orthonormal basis (columns) of the ground eigenspace."""
    w, v = _eigh(op)
    deg = int(np.count_nonzero(w - w[0] < tol))
    return float(w[0]), v[:, :deg]


def ground_state(
    op: Operator,
    reference: StateVector | None = None,
    tol: float = DEGENERACY_TOL,
) -> tuple[float, StateVector]:
    """Lowest eigenvalue and a unit ground vector.

    When the ground level is degenerate (splitting below ``tol``) the vector
    returned is the normalized projection of ``reference`` onto the ground
    space, i.e. the ground vector of maximal overlap with it.  Without a
    reference (or if it is orthogonal to the ground space) the projection of
    the lowest-index basis vector with nonzero weight is used.  The global
    phase is fixed by :func:`fix_phase`.
    """
    energy, space = ground_space(op, tol)
    if space.shape[1] == 1:
        vec = space[:, 0]
    else:
        vec = None
        if reference is not None:
            _check_basis(op, reference)
            proj = space @ (space.conj().T @ reference.amps)
            if np.linalg.norm(proj) > 1e-12:
                vec = proj
        if vec is None:
            j = int(np.argmax(np.linalg.norm(space, axis=1) > 1e-12))
            vec = space @ space[j].conj()
        vec = vec / np.linalg.norm(vec)
    vec = fix_phase(vec)
    residual = np.linalg.norm(op.apply(vec) - energy * vec)
    if residual > 1e-10 * max(1.0, op.norm_bound()):
        raise EigensolverError(f"ground-state residual {residual:.3e} too large")
    return energy, StateVector(op.basis, vec)

