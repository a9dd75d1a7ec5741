"""Set-colorings of K_N built from points on t complex spheres.

Vertices are points ``v_m^{(j)}`` on spheres ``j = 0..t-1``, numbered
lexicographically by (sphere, index).  For a cross pair with the first point
on a lower-numbered sphere, the pair joins color ``f`` iff the argument of
their inner product lies in the half-open arc ``[2 pi f/q, 2 pi (f+p)/q)``.
Since those q arcs cover every angle exactly p times, every cross pair lands
in exactly p colors without any bookkeeping.  Pairs inside one sphere get p
consecutive residues (see :func:`assign_intra_sphere`).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .config import NONZERO_GUARD, RESAMPLE_CAP
from .errors import ConstructionError, PreconditionError
from .geometry import from_real, gram, phase_sector, rotate, sample_uniform
from .graphs import SimpleGraph, pack_rows, unpack_rows
from .partition import EqualAreaPartition

MODES = ("sampled", "partitioned")


def sphere_sizes(total: int, t: int) -> list[int]:
    """Split ``total`` vertices over t spheres, sizes differing by at most one."""
    base, extra = divmod(total, t)
    return [base + 1 if j < extra else base for j in range(t)]


@dataclass
class SphereFamily:
    """t point sets on copies of S^{k-1}(C).

    ``p``/``q`` are the arc parameters used for cross pairs; for the dense
    regime they are the (q-p, q) pair of the stage that gets complemented.
    """

    p: int
    q: int
    k: int
    points: list
    eta: float
    seed: int
    mode: str = "sampled"

    def __post_init__(self):
        self.points = [np.ascontiguousarray(v, dtype=np.complex128) for v in self.points]
        for v in self.points:
            if v.ndim != 2 or v.shape[1] != self.k:
                raise ValueError(f"points must have shape (n_j, {self.k})")

    @property
    def t(self) -> int:
        return len(self.points)

    @property
    def sizes(self) -> list[int]:
        return [len(v) for v in self.points]

    @property
    def n(self) -> int:
        return max(self.sizes)

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def mu(self) -> float:
        return self.eta / math.sqrt(2 * self.k)

    @property
    def offsets(self) -> list[int]:
        return list(np.cumsum([0] + self.sizes[:-1]))

    def vertices_of(self, j: int) -> range:
        start = self.offsets[j]
        return range(start, start + self.sizes[j])

    def vertex_origin(self) -> np.ndarray:
        return np.array([(j, m) for j, size in enumerate(self.sizes) for m in range(size)],
                        dtype=np.int64).reshape(-1, 2)

    def sphere_of(self, v: int) -> int:
        return int(np.searchsorted(np.cumsum(self.sizes), v, side="right"))

    def point(self, v: int) -> np.ndarray:
        j = self.sphere_of(v)
        return self.points[j][v - self.offsets[j]]

    def all_points(self) -> np.ndarray:
        return np.concatenate(self.points, axis=0)

    def with_points(self, points) -> "SphereFamily":
        return replace(self, points=[np.array(v, dtype=np.complex128) for v in points])

    def params(self) -> dict:
        return {"p": self.p, "q": self.q, "k": self.k, "t": self.t, "sizes": self.sizes,
                "eta": self.eta, "mu": self.mu, "seed": self.seed, "mode": self.mode}


@dataclass(eq=False)
class SetColoring:
    """q graphs on a common vertex set covering every pair exactly p times."""

    n: int
    p: int
    q: int
    colors: list
    vertex_origin: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def color_class(self, f: int) -> SimpleGraph:
        return SimpleGraph(self.n, self.colors[f % self.q], label=f"G_{f % self.q}")

    def membership_counts(self) -> np.ndarray:
        counts = np.zeros((self.n, self.n), dtype=np.int16)
        for bits in self.colors:
            counts += unpack_rows(bits, self.n)
        return counts

    def exactly_p_violations(self) -> int:
        """Number of unordered pairs not covered by exactly p colors."""
        counts = self.membership_counts()
        iu = np.triu_indices(self.n, k=1)
        return int(np.count_nonzero(counts[iu] != self.p))

    def complement(self) -> "SetColoring":
        colors = [self.color_class(f).complement().bits for f in range(self.q)]
        params = dict(self.params, complemented=not self.params.get("complemented", False))
        return SetColoring(self.n, self.q - self.p, self.q, colors, self.vertex_origin, params)

    def __eq__(self, other):
        if not isinstance(other, SetColoring):
            return NotImplemented
        same_origin = ((self.vertex_origin is None and other.vertex_origin is None)
                       or (self.vertex_origin is not None and other.vertex_origin is not None
                           and np.array_equal(self.vertex_origin, other.vertex_origin)))
        return (self.n == other.n and self.p == other.p and self.q == other.q and same_origin
                and all(np.array_equal(a, b) for a, b in zip(self.colors, other.colors)))


def color_class(coloring: SetColoring, f: int) -> SimpleGraph:
    return coloring.color_class(f)


def assign_intra_sphere(r: int, s: int, p: int, q: int) -> frozenset:
    """Colors of a pair inside one sphere, from 1-based positions r != s.

    The pair gets the p consecutive residues starting at (r + s) mod q.
    """
    if r == s:
        raise ValueError("intra-sphere pair needs two distinct positions")
    if not 1 <= p < q:
        raise ValueError("need 1 <= p < q")
    base = r + s
    return frozenset((base + i) % q for i in range(p))


def _intra_block(size: int, f: int, p: int, q: int) -> np.ndarray:
    pos = np.arange(1, size + 1)
    base = (pos[:, None] + pos[None, :]) % q
    block = (f - base) % q < p
    np.fill_diagonal(block, False)
    return block


def _random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    qm, r = np.linalg.qr(a)
    return qm * np.sign(np.diag(r))


def _zero_pairs(earlier: list, cand: np.ndarray) -> np.ndarray:
    """Indices of candidate points with a near-zero inner product against earlier spheres."""
    bad = np.zeros(len(cand), dtype=bool)
    for prev in earlier:
        bad |= np.abs(gram(prev, cand)).min(axis=0) < NONZERO_GUARD
    return np.nonzero(bad)[0]


def make_family(p: int, q: int, k: int, t: int, n: int, eta: float, seed: int,
                mode: str = "sampled", total: int | None = None) -> SphereFamily:
    """Place the vertex points.

    ``sampled``: i.i.d. uniform points per sphere.  ``partitioned``: centers
    of an equal-area partition, each sphere under its own random isometry.
    ``total`` overrides ``t * n`` and spreads vertices as evenly as possible.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if min(k, t, n) < 1:
        raise ValueError("k, t, n must be >= 1")
    sizes = sphere_sizes(total, t) if total is not None else [n] * t
    children = np.random.SeedSequence(seed).spawn(t)
    points: list = []
    partitions: dict = {}
    for j, size in enumerate(sizes):
        rng = np.random.default_rng(children[j])
        if mode == "sampled":
            v = sample_uniform(k, size, rng)
            for _ in range(RESAMPLE_CAP):
                bad = _zero_pairs(points, v)
                if not len(bad):
                    break
                v[bad] = sample_uniform(k, len(bad), rng)
            else:
                if len(_zero_pairs(points, v)):
                    raise ConstructionError(f"sphere {j}: zero inner product after {RESAMPLE_CAP} resamples")
        else:
            if size not in partitions:
                partitions[size] = EqualAreaPartition(2 * k, size).centers()
            centers = partitions[size]
            for _ in range(RESAMPLE_CAP):
                v = from_real(centers @ _random_rotation(2 * k, rng).T)
                if not len(_zero_pairs(points, v)):
                    break
            else:
                raise ConstructionError(f"sphere {j}: zero inner product after {RESAMPLE_CAP} rotations")
        points.append(v)
    return SphereFamily(p, q, k, points, eta, seed, mode)


def cross_sectors(family: SphereFamily, threads: int = 1) -> dict:
    """Phase sector of <v^{(h)}_r, v^{(j)}_s> for every sphere pair h < j."""
    pairs = [(h, j) for h in range(family.t) for j in range(h + 1, family.t)]

    def one(hj):
        h, j = hj
        g = gram(family.points[h], family.points[j])
        if np.abs(g).min(initial=np.inf) < NONZERO_GUARD:
            raise ConstructionError(f"zero inner product between spheres {h} and {j}")
        return phase_sector(g, family.q).astype(np.int8)

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(threads) as pool:
            blocks = list(pool.map(one, pairs))
    else:
        blocks = [one(hj) for hj in pairs]
    return dict(zip(pairs, blocks))


def cross_adjacency(family: SphereFamily, f: int, sectors: dict | None = None,
                    p: int | None = None) -> np.ndarray:
    """Dense cross-pair adjacency of color f (intra-sphere blocks empty)."""
    p = family.p if p is None else p
    q = family.q
    sectors = cross_sectors(family) if sectors is None else sectors
    offs, sizes = family.offsets, family.sizes
    adj = np.zeros((family.N, family.N), dtype=bool)
    for (h, j), sec in sectors.items():
        block = (sec.astype(np.int64) - f) % q < p
        adj[offs[h]:offs[h] + sizes[h], offs[j]:offs[j] + sizes[j]] = block
        adj[offs[j]:offs[j] + sizes[j], offs[h]:offs[h] + sizes[h]] = block.T
    return adj


def color_family(family: SphereFamily, threads: int = 1) -> SetColoring:
    """Build the exactly-p coloring defined by the family's points."""
    p, q = family.p, family.q
    sectors = cross_sectors(family, threads)
    colors = []
    for f in range(q):
        adj = cross_adjacency(family, f, sectors)
        for j, size in enumerate(family.sizes):
            o = family.offsets[j]
            adj[o:o + size, o:o + size] = _intra_block(size, f, p, q)
        colors.append(pack_rows(adj))
    params = dict(family.params(), construction=1, complemented=False)
    return SetColoring(family.N, p, q, colors, family.vertex_origin(), params)


def _check_pq(p: int, q: int):
    if not (isinstance(p, (int, np.integer)) and isinstance(q, (int, np.integer)) and 1 <= p < q):
        raise PreconditionError(f"need integers 1 <= p < q, got p={p}, q={q}")


def build_construction1(p: int, q: int, k: int, t: int, n: int, eta: float, seed: int,
                        mode: str = "sampled", total: int | None = None,
                        threads: int = 1) -> tuple[SphereFamily, SetColoring]:
    """Sparse regime p/q <= 1/2."""
    _check_pq(p, q)
    if 2 * p > q:
        raise PreconditionError(f"p/q = {p}/{q} > 1/2: use build_construction2")
    family = make_family(p, q, k, t, n, eta, seed, mode, total)
    return family, color_family(family, threads)


def build_construction2(p: int, q: int, k: int, t: int, n: int, eta: float, seed: int,
                        mode: str = "sampled", total: int | None = None,
                        threads: int = 1) -> tuple[SphereFamily, SetColoring]:
    """Dense regime p/q > 1/2: complements of the (q-p, q) sparse coloring.

    The returned family carries the (q-p, q) arc parameters of that stage.
    """
    _check_pq(p, q)
    if 2 * p <= q:
        raise PreconditionError(f"p/q = {p}/{q} <= 1/2: use build_construction1")
    family, stage = build_construction1(q - p, q, k, t, n, eta, seed, mode, total, threads)
    coloring = stage.complement()
    coloring.params["construction"] = 2
    return family, coloring


def build_coloring(p: int, q: int, k: int, t: int, n: int, eta: float, seed: int, **kw):
    """Pick the construction matching the density p/q."""
    build = build_construction1 if 2 * p <= q else build_construction2
    return build(p, q, k, t, n, eta, seed, **kw)


def isomorphism_transform(family: SphereFamily, f: int, j: int) -> SphereFamily:
    """Rotate spheres below j by zeta^f and spheres above j by zeta^{-f}."""
    pts = []
    for h, v in enumerate(family.points):
        if h < j:
            pts.append(rotate(v, f, family.q))
        elif h > j:
            pts.append(rotate(v, -f, family.q))
        else:
            pts.append(v.copy())
    return family.with_points(pts)
