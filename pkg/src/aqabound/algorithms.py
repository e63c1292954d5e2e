"""Constructors for the adiabatic algorithms analysed by the bound engine.

Each constructor returns a :class:`Problem` bundling the driver ``h0``, the
final Hamiltonian ``h1``, the driver ground state ``phi0`` and, when it is
known in closed form, the target ``phi1``.

Full-register labels use ``z_i = (label >> i) & 1``; the Deutsch-Jozsa final
states refer to label parity, which does not depend on that convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Any

import numpy as np

from .errors import SizeCapError
from .graph_tools import Graph, SubspaceIndex, cost_values
from .quantum_core import (
    BasisDescriptor,
    DenseOperator,
    DiagonalOperator,
    Operator,
    ProjectorComplement,
    StateVector,
)

MAX_QUBITS = 20
MAX_DENSE_QUBITS = 12


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    basis: BasisDescriptor
    h1: Operator
    phi0: StateVector
    h0: Operator | None = None
    phi1: StateVector | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.meta,
            "basis": self.basis.to_dict(),
            "h0": None if self.h0 is None else self.h0.to_dict(),
            "h1": self.h1.to_dict(),
            "phi0": self.phi0.to_dict(),
            "phi1": None if self.phi1 is None else self.phi1.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> Problem:
        basis = BasisDescriptor.from_dict(d["basis"])
        return cls(
            name=d["name"],
            basis=basis,
            h0=None if d.get("h0") is None else Operator.from_dict(basis, d["h0"]),
            h1=Operator.from_dict(basis, d["h1"]),
            phi0=StateVector.from_dict(basis, d["phi0"]),
            phi1=None if d.get("phi1") is None else StateVector.from_dict(basis, d["phi1"]),
            meta=dict(d.get("params", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> Problem:
        return cls.from_dict(json.loads(text))


def _check_qubits(n: int, cap: int = MAX_QUBITS) -> None:
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    if n > cap:
        raise SizeCapError(f"n={n} exceeds the size cap of {cap} qubits")


def _popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


@dataclass(frozen=True)
class BooleanFunctionSpec:
    """A Boolean function on n bits.

    ``constant`` returns ``bit`` everywhere.  ``balanced`` with variant ``v``
    is the parity of ``z & mask`` with ``mask = v mod (2**n - 1) + 1``; any
    nonzero mask gives exactly ``2**(n-1)`` ones.  ``inner_product`` is
    ``sum_i z_i s_i mod 2`` for the bit string ``s`` (``s[i]`` is ``z_i``'s
    partner).
    """

    kind: str
    bit: int = 0
    variant: int = 0
    s: str | None = None

    @classmethod
    def constant(cls, bit: int = 0) -> BooleanFunctionSpec:
        return cls("constant", bit=int(bit) & 1)

    @classmethod
    def balanced(cls, variant: int = 0) -> BooleanFunctionSpec:
        return cls("balanced", variant=variant)

    @classmethod
    def inner_product(cls, s: str) -> BooleanFunctionSpec:
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"secret must be a nonempty 0/1 string, got {s!r}")
        return cls("inner_product", s=s)

    def mask(self, n: int) -> int:
        if self.kind == "balanced":
            return self.variant % (2**n - 1) + 1
        if self.kind == "inner_product":
            if len(self.s) != n:
                raise ValueError(f"secret {self.s!r} has {len(self.s)} bits, expected {n}")
            return sum(1 << i for i, c in enumerate(self.s) if c == "1")
        return 0

    def truth_table(self, n: int) -> np.ndarray:
        """``f(z)`` for every label ``z`` in ``0..2**n - 1``."""
        z = np.arange(2**n, dtype=np.int64)
        if self.kind == "constant":
            return np.full(z.size, self.bit, dtype=np.int64)
        if self.kind in ("balanced", "inner_product"):
            return _popcount(z & self.mask(n)) & 1
        raise ValueError(f"unknown Boolean function kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "bit": self.bit, "variant": self.variant, "s": self.s}


def dj_parameter(n: int, f: BooleanFunctionSpec) -> int:
    """``mu_f = |sum_z (-1)^f(z)| / 2**n`` by direct summation; 1 if constant, 0 if balanced."""
    total = int(np.sum(1 - 2 * f.truth_table(n)))
    if abs(total) == 2**n:
        return 1
    if total == 0:
        return 0
    raise ValueError("function is neither constant nor balanced")


def uniform_superposition(n: int, cap: int = MAX_QUBITS) -> StateVector:
    _check_qubits(n, cap)
    dim = 2**n
    return StateVector(BasisDescriptor.full(n), np.full(dim, dim**-0.5, dtype=complex))


def dicke_state(n: int, k: int) -> StateVector:
    """Uniform superposition of the C(n, k) weight-k labels, in the Hamming basis."""
    basis = BasisDescriptor.hamming(n, k)
    return StateVector(basis, np.full(basis.dim, basis.dim**-0.5, dtype=complex))


def _projector_problem(name, phi0, phi1, meta) -> Problem:
    return Problem(
        name=name,
        basis=phi0.basis,
        h0=ProjectorComplement(phi0),
        h1=ProjectorComplement(phi1),
        phi0=phi0,
        phi1=phi1,
        meta=meta,
    )


def dj_das(n: int, f: BooleanFunctionSpec) -> Problem:
    """Deutsch-Jozsa with target ``|0>`` (constant) or the rest of the register (balanced).

    The balanced target is normalized as ``(N - 1)**-1/2 * sum_{i>0} |i>``.
    """
    _check_qubits(n)
    mu = dj_parameter(n, f)
    phi0 = uniform_superposition(n)
    amps = np.zeros(2**n, dtype=complex)
    if mu:
        amps[0] = 1.0
    else:
        amps[1:] = (2**n - 1) ** -0.5
    phi1 = StateVector(phi0.basis, amps)
    return _projector_problem("dj-das", phi0, phi1, {"n": n, "N": 2**n, "mu_f": mu, "f": f.to_dict()})


def dj_wei(n: int, f: BooleanFunctionSpec) -> Problem:
    """Deutsch-Jozsa with target uniform over even labels (constant) or odd labels (balanced)."""
    _check_qubits(n)
    mu = dj_parameter(n, f)
    phi0 = uniform_superposition(n)
    half = 2 ** (n - 1)
    amps = np.zeros(2**n, dtype=complex)
    amps[0::2] = mu / np.sqrt(half)
    amps[1::2] = (1 - mu) / np.sqrt(half)
    phi1 = StateVector(phi0.basis, amps)
    return _projector_problem("dj-wei", phi0, phi1, {"n": n, "N": 2**n, "mu_f": mu, "f": f.to_dict()})


def bernstein_vazirani(n: int, s: str) -> Problem:
    """Bernstein-Vazirani on n query qubits (register A) plus one answer qubit (B).

    ``h0 = I_A (x) |-><-|``, ``h1 = I - sum_z |z><z| (x) |f(z)><f(z)|`` (diagonal),
    ``phi0 = |+>^(n+1)``.  The driver ground space is ``2**n``-fold degenerate;
    ``phi0`` is pinned explicitly.
    """
    _check_qubits(n + 1, MAX_DENSE_QUBITS)
    f = BooleanFunctionSpec.inner_product(s)
    fz = f.truth_table(n)
    basis = BasisDescriptor.tensor(n, 1)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    h0 = DenseOperator(basis, np.kron(np.eye(2**n), minus))
    b = np.tile([0, 1], 2**n)
    h1 = DiagonalOperator(basis, (b != np.repeat(fz, 2)).astype(float))
    dim = basis.dim
    phi0 = StateVector(basis, np.full(dim, dim**-0.5, dtype=complex))
    amps = np.zeros(dim, dtype=complex)
    amps[2 * np.arange(2**n) + fz] = 2 ** (-n / 2)
    phi1 = StateVector(basis, amps)
    return Problem("bv", basis, h1, phi0, h0=h0, phi1=phi1, meta={"n": n, "s": s})


def grover(n: int, marked, form: str = "diagonal") -> Problem:
    """Adiabatic unstructured search over ``N = 2**n`` items.

    ``form="diagonal"`` gives ``h1 = I - sum_{m in marked} |m><m|``;
    ``form="projector"`` gives ``h1 = I - |phi1><phi1|`` with ``phi1`` uniform
    over the marked set.  For a single marked item the two coincide.
    """
    _check_qubits(n)
    N = 2**n
    marked = sorted({int(m) for m in marked})
    if not marked or len(marked) >= N:
        raise ValueError(f"need 1 <= M < N={N} marked items, got {len(marked)}")
    if marked[0] < 0 or marked[-1] >= N:
        raise ValueError(f"marked labels must lie in [0, {N})")
    phi0 = uniform_superposition(n)
    amps = np.zeros(N, dtype=complex)
    amps[marked] = len(marked) ** -0.5
    phi1 = StateVector(phi0.basis, amps)
    if form == "diagonal":
        cost = np.ones(N)
        cost[marked] = 0.0
        h1 = DiagonalOperator(phi0.basis, cost)
    elif form == "projector":
        h1 = ProjectorComplement(phi1)
    else:
        raise ValueError(f"unknown Grover form {form!r}")
    meta = {"n": n, "N": N, "M": len(marked), "marked": marked, "form": form}
    return Problem("grover", phi0.basis, h1, phi0, h0=ProjectorComplement(phi0), phi1=phi1, meta=meta)


def ising_counterexample(n: int) -> Problem:
    """Periodic chain ``h1 = -sum_{i=0}^{n-1} Z_i Z_{i+1 mod n}`` with uniform ``phi0``.

    Only ``h1`` and ``phi0`` are defined; there is no driver.
    """
    if n < 3:
        raise ValueError(f"Ising chain needs n >= 3, got {n}")
    _check_qubits(n)
    spins = 1 - 2 * ((np.arange(2**n)[:, None] >> np.arange(n)) & 1)
    values = -np.sum(spins * np.roll(spins, -1, axis=1), axis=1)
    phi0 = uniform_superposition(n)
    return Problem("ising", phi0.basis, DiagonalOperator(phi0.basis, values), phi0, meta={"n": n})


def hopping_hamiltonian(n: int, k: int) -> DenseOperator:
    """``-sum_{i>j} (|1_i 0_j><0_i 1_j| + h.c.)`` restricted to weight k."""
    idx = SubspaceIndex(n, k)
    labels = idx.labels
    dim = idx.size
    if dim > 2**MAX_DENSE_QUBITS:
        raise SizeCapError(f"C({n},{k}) = {dim} exceeds the dense cap")
    pos = {int(lab): r for r, lab in enumerate(labels)}
    m = np.zeros((dim, dim))
    for r, lab in enumerate(labels.tolist()):
        for i in range(n):
            if not lab >> i & 1:
                continue
            for j in range(n):
                if lab >> j & 1:
                    continue
                m[pos[lab ^ (1 << i) ^ (1 << j)], r] = -1.0
    return DenseOperator(BasisDescriptor.hamming(n, k), m)


def kclique(graph: Graph, k: int, deformed: bool = False) -> Problem:
    """k-clique search in the weight-k subspace with a Dicke initial state.

    ``h1`` is diagonal with the clique cost (``deformed`` clips it at 1).
    ``phi1`` is uniform over the cliques when at least one exists.  The
    hopping driver is only built while the subspace fits the dense cap.
    """
    n = graph.n
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n={n}, got k={k}")
    basis = BasisDescriptor.hamming(n, k)
    cost = cost_values(graph, k, deformed)
    h1 = DiagonalOperator(basis, cost)
    phi0 = dicke_state(n, k)
    cliques = np.flatnonzero(cost == 0)
    phi1 = None
    if cliques.size:
        amps = np.zeros(basis.dim, dtype=complex)
        amps[cliques] = cliques.size**-0.5
        phi1 = StateVector(basis, amps)
    meta = {
        "n": n,
        "k": k,
        "deformed": deformed,
        "M": int(cliques.size),
        "edges": graph.edges(),
        "degenerate": bool(np.all(cost == cost[0])),
    }
    return Problem(
        "kclique-deformed" if deformed else "kclique",
        basis,
        h1,
        phi0,
        h0=hopping_hamiltonian(n, k) if basis.dim <= 2**MAX_DENSE_QUBITS else None,
        phi1=phi1,
        meta=meta,
    )
