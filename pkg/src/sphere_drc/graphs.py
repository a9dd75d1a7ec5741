"""Bit-packed simple graphs.

Adjacency is stored as a symmetric bit-matrix: row ``v`` is an array of
``ceil(N/64)`` little-endian uint64 words, bit ``u`` set iff ``uv`` is an edge.
Common neighbourhoods are row ANDs, codegrees are popcounts.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .config import MAX_HYPERCUBE_BUILD, MAX_HYPERCUBE_ENUM
from .errors import ResourceError


def n_words(n: int) -> int:
    return (n + 63) // 64


def pack_rows(dense: np.ndarray) -> np.ndarray:
    dense = np.asarray(dense, dtype=bool)
    rows, cols = dense.shape
    packed = np.packbits(dense, axis=1, bitorder="little")
    pad = n_words(cols) * 8 - packed.shape[1]
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view("<u8").reshape(rows, n_words(cols))


def unpack_rows(words: np.ndarray, n: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(as_bytes, axis=-1, count=n, bitorder="little").astype(bool)


def popcount(words: np.ndarray) -> np.ndarray:
    """Number of set bits along the last axis."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def vertex_mask(vertices, n: int) -> np.ndarray:
    """Packed row with the bits of ``vertices`` set."""
    row = np.zeros(n, dtype=bool)
    row[np.asarray(list(vertices), dtype=np.int64)] = True
    return pack_rows(row[None, :])[0]


class SimpleGraph:
    """Undirected simple graph on vertices 0..N-1."""

    def __init__(self, n: int, bits: np.ndarray, label: str = ""):
        self.n = int(n)
        self.bits = np.ascontiguousarray(bits, dtype=np.uint64)
        self.label = label
        if self.bits.shape != (self.n, n_words(self.n)):
            raise ValueError(f"bit-matrix shape {self.bits.shape} does not match N={n}")

    @classmethod
    def from_dense(cls, adj, label: str = "", check: bool = True) -> "SimpleGraph":
        adj = np.asarray(adj, dtype=bool)
        if check:
            if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
                raise ValueError("adjacency must be square")
            if adj.diagonal().any():
                raise ValueError("adjacency has loops")
            if not np.array_equal(adj, adj.T):
                raise ValueError("adjacency is not symmetric")
        return cls(adj.shape[0], pack_rows(adj), label)

    @classmethod
    def from_edges(cls, n: int, edges, label: str = "") -> "SimpleGraph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not allowed")
            adj[u, v] = adj[v, u] = True
        return cls.from_dense(adj, label, check=False)

    @classmethod
    def empty(cls, n: int, label: str = "empty") -> "SimpleGraph":
        return cls(n, np.zeros((n, n_words(n)), dtype=np.uint64), label)

    @classmethod
    def complete(cls, n: int, label: str = "complete") -> "SimpleGraph":
        return cls.empty(n).complement(label)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.bits, self.n)

    def degrees(self) -> np.ndarray:
        return popcount(self.bits)

    def edge_count(self) -> int:
        return int(self.degrees().sum()) // 2

    def density(self) -> float:
        pairs = self.n * (self.n - 1) // 2
        return self.edge_count() / pairs if pairs else 0.0

    def has_edge(self, u: int, v: int) -> bool:
        u, v = int(u), int(v)
        return bool((int(self.bits[u, v >> 6]) >> (v & 63)) & 1)

    def neighbors(self, v: int) -> np.ndarray:
        return np.nonzero(unpack_rows(self.bits[v], self.n))[0]

    def common_row(self, vertices) -> np.ndarray:
        vs = np.asarray(list(vertices), dtype=np.int64)
        if vs.size == 0:
            raise ValueError("common neighbourhood of an empty set is undefined")
        return np.bitwise_and.reduce(self.bits[vs], axis=0)

    def complement(self, label: str | None = None) -> "SimpleGraph":
        full = np.broadcast_to(vertex_mask(range(self.n), self.n), self.bits.shape)
        out = np.bitwise_xor(self.bits, full)
        idx = np.arange(self.n)
        out[idx, idx >> 6] &= ~(np.uint64(1) << (idx & 63).astype(np.uint64))
        return SimpleGraph(self.n, out, self.label + "^c" if label is None else label)

    def induced_mask(self, vertices) -> np.ndarray:
        return vertex_mask(vertices, self.n)

    def __eq__(self, other):
        return (isinstance(other, SimpleGraph) and self.n == other.n
                and np.array_equal(self.bits, other.bits))

    def __repr__(self):
        return f"SimpleGraph(N={self.n}, edges={self.edge_count()}, label={self.label!r})"


def complement(g: SimpleGraph) -> SimpleGraph:
    return g.complement()


def build_random_graph(n: int, density: float, seed) -> SimpleGraph:
    """G(n, density): each pair independently an edge."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < density, k=1)
    return SimpleGraph.from_dense(upper | upper.T, label=f"G({n},{density})", check=False)


def hypercube_degree(m: int) -> int:
    """Degree of any vertex of the Hamming-ball graph, by enumerating {0,1}^m."""
    if not 1 <= m <= MAX_HYPERCUBE_ENUM:
        raise ResourceError(f"hypercube enumeration supports 1 <= m <= {MAX_HYPERCUBE_ENUM}")
    weights = np.bitwise_count(np.arange(2**m, dtype=np.uint32))
    return int(np.count_nonzero((weights >= 1) & (weights <= m // 2)))


def hypercube_density(m: int) -> Fraction:
    # the graph is vertex-transitive (translation by XOR), so density = degree / (2^m - 1)
    return Fraction(hypercube_degree(m), 2**m - 1)


def build_hypercube(m: int) -> SimpleGraph:
    """Vertices {0,1}^m, edges between words at Hamming distance 1..floor(m/2)."""
    if not 1 <= m <= MAX_HYPERCUBE_BUILD:
        raise ResourceError(
            f"dense hypercube build supports 1 <= m <= {MAX_HYPERCUBE_BUILD} "
            f"(2^{m} vertices requested); use hypercube_density for larger m")
    n = 2**m
    verts = np.arange(n, dtype=np.uint32)
    bits = np.empty((n, n_words(n)), dtype=np.uint64)
    block = max(1, (1 << 22) // n)
    for lo in range(0, n, block):
        rows = verts[lo:lo + block, None] ^ verts[None, :]
        dist = np.bitwise_count(rows)
        bits[lo:lo + block] = pack_rows((dist >= 1) & (dist <= m // 2))
    return SimpleGraph(n, bits, label=f"hypercube({m})")

