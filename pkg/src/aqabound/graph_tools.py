"""Graphs, brute-force k-clique counting, and the Hamming-weight subspace index.

Bitstring labels are plain integers with ``z_i = (label >> i) & 1``, so vertex
``i`` of a graph corresponds to bit ``i`` of a label.  Weight-k labels are
ranked colexicographically, which for this encoding coincides with increasing
integer order of the labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .errors import GraphParseError, SizeCapError

#: Identifier recorded in reports so seeded graphs can be regenerated.
PRNG_ID = "numpy.random.Generator(PCG64)"

MAX_SUBSETS = 10**7


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (self.n, self.n):
            raise ValueError(f"adjacency must be {self.n}x{self.n}, got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency matrix is not symmetric")
        if adj.diagonal().any():
            raise ValueError("adjacency matrix has self-loops")
        adj = adj.copy()
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            adj[i, j] = adj[j, i] = True
        return cls(n, adj)

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, ~np.eye(n, dtype=bool))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, np.zeros((n, n), dtype=bool))

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(i, j)`` pairs with ``i < j``, sorted."""
        ii, jj = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(ii.tolist(), jj.tolist()))

    @property
    def edge_count(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency.tobytes()))


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi graph G(n, p) from a seeded PCG64 stream.

    One uniform draw is consumed per vertex pair, in the order
    ``(1,0), (2,0), (2,1), (3,0), ...`` (row-major over ``i > j``); the pair is
    an edge iff its draw is ``< p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(n * (n - 1) // 2)
    ii, jj = np.tril_indices(n, -1)
    present = draws < p
    adj = np.zeros((n, n), dtype=bool)
    adj[ii[present], jj[present]] = True
    return Graph(n, adj | adj.T)


def load_edge_list(text: str) -> Graph:
    """Parse the edge-list format.

    Grammar, one item per line: ``n <count>`` (header, fixes the vertex
    count), ``i j`` (an edge, 0-based ids), blank lines, and ``#`` comments.
    Without a header the vertex count is ``max id + 1``.  Duplicate edges are
    idempotent; self-loops and out-of-range ids are rejected.
    """
    n = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or not parts[1].isdigit():
                raise GraphParseError(f"malformed header {raw!r}", lineno)
            if n is not None:
                raise GraphParseError("duplicate header", lineno)
            if edges:
                raise GraphParseError("header must precede edges", lineno)
            n = int(parts[1])
            continue
        if len(parts) != 2 or not all(x.isdigit() for x in parts):
            raise GraphParseError(f"malformed edge line {raw!r}", lineno)
        i, j = int(parts[0]), int(parts[1])
        if i == j:
            raise GraphParseError(f"self-loop on vertex {i}", lineno)
        if n is not None and max(i, j) >= n:
            raise GraphParseError(f"vertex id {max(i, j)} >= n={n}", lineno)
        edges.append((i, j, lineno))
    if n is None:
        n = 1 + max((max(i, j) for i, j, _ in edges), default=-1)
    return Graph.from_edges(n, [(i, j) for i, j, _ in edges])


def dump_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{i} {j}" for i, j in g.edges()]
    return "\n".join(lines) + "\n"


def _check_k(g: Graph, k: int) -> None:
    if not 2 <= k <= g.n:
        raise ValueError(f"need 2 <= k <= n={g.n}, got k={k}")
    if comb(g.n, k) > MAX_SUBSETS:
        raise SizeCapError(f"C({g.n},{k}) = {comb(g.n, k)} subsets exceeds {MAX_SUBSETS}")


def count_kcliques(g: Graph, k: int) -> int:
    """Number of k-vertex subsets whose C(k,2) internal edges are all present.

    Exhaustive over all C(n,k) subsets; this is the reference count, not a
    fast clique finder.
    """
    _check_k(g, k)
    adj = g.adjacency
    count = 0
    for subset in itertools.combinations(range(g.n), k):
        if all(adj[a, b] for a, b in itertools.combinations(subset, 2)):
            count += 1
    return count


def count_triangles(g: Graph) -> int:
    """Triangle count from ``trace(A^3) / 6``; independent of the subset walk."""
    a = g.adjacency.astype(np.int64)
    return int(np.trace(a @ a @ a)) // 6


class SubspaceIndex:
    """Colexicographic bijection between weight-k labels and ``0..C(n,k)-1``.

    The rank of a subset ``c_1 < c_2 < ... < c_k`` is ``sum_j C(c_j, j)``
    (combinatorial number system).
    """

    def __init__(self, n: int, k: int):
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
        self.n = n
        self.k = k
        self.size = comb(n, k)

    def rank(self, label: int) -> int:
        if label < 0 or label >> self.n or bin(label).count("1") != self.k:
            raise ValueError(f"{label:#b} is not a weight-{self.k} label on {self.n} bits")
        r, j, pos = 0, 1, 0
        while label:
            if label & 1:
                r += comb(pos, j)
                j += 1
            label >>= 1
            pos += 1
        return r

    def unrank(self, r: int) -> int:
        if not 0 <= r < self.size:
            raise IndexError(f"rank {r} out of range [0, {self.size})")
        label = 0
        c = self.n - 1
        for j in range(self.k, 0, -1):
            while comb(c, j) > r:
                c -= 1
            label |= 1 << c
            r -= comb(c, j)
            c -= 1
        return label

    @cached_property
    def labels(self) -> np.ndarray:
        """All labels in rank order."""
        out = np.fromiter(
            (sum(1 << v for v in c) for c in itertools.combinations(range(self.n), self.k)),
            dtype=np.int64,
            count=self.size,
        )
        out.sort()
        out.setflags(write=False)
        return out

    @cached_property
    def bits(self) -> np.ndarray:
        """``(C(n,k), n)`` 0/1 matrix of label bits, rows in rank order."""
        b = ((self.labels[:, None] >> np.arange(self.n)) & 1).astype(np.int64)
        b.setflags(write=False)
        return b

    def __repr__(self):
        return f"SubspaceIndex(n={self.n}, k={self.k})"


def cost_values(g: Graph, k: int, deformed: bool = False) -> np.ndarray:
    """Clique cost ``h_C(z) = sum_{i>j} (1 - G_ij) z_i z_j`` over weight-k labels.

    With ``deformed`` the cost is clipped to ``min(h_C, 1)``.  Values follow
    :class:`SubspaceIndex` order.
    """
    _check_k(g, k)
    z = SubspaceIndex(g.n, k).bits
    missing = (~g.adjacency).astype(np.int64)
    np.fill_diagonal(missing, 0)
    h = np.einsum("ai,ij,aj->a", z, missing, z) // 2
    if deformed:
        h = np.minimum(h, 1)
    return h.astype(float)
