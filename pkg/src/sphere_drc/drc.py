"""Dependent random choice and the rich-set procedures built on codegrees."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from .analysis import codegrees
from .config import EXHAUSTIVE_LIMIT, SAMPLED_DRAWS
from .errors import PreconditionError
from .graphs import SimpleGraph, popcount, unpack_rows, vertex_mask
from .report import Report


@dataclass
class DrcParams:
    """Inputs of one dependent-random-choice run.

    ``t_exponent`` is the number of random vertices drawn; it is unrelated to
    the sphere count of a coloring.
    """

    t_exponent: int
    r: int
    m: int
    a: int
    d: float | None = None
    n: int | None = None

    def with_graph(self, g: SimpleGraph) -> "DrcParams":
        return DrcParams(self.t_exponent, self.r, self.m, self.a, 2 * g.edge_count() / g.n, g.n)

    def guarantee(self) -> float:
        """d^t / n^{t-1} - C(n, r) (m/n)^t."""
        if self.d is None or self.n is None:
            raise ValueError("d and n are unset; call with_graph first")
        t, n = self.t_exponent, self.n
        return self.d**t / n ** (t - 1) - math.comb(n, self.r) * (self.m / n) ** t

    def guaranteed(self) -> bool:
        return self.guarantee() >= self.a


# r-subset enumeration --------------------------------------------------------

def _subsets(vertices: np.ndarray, r: int, rng: np.random.Generator, draws: int = SAMPLED_DRAWS):
    """All r-subsets of ``vertices`` if few enough, else ``draws`` uniform ones."""
    total = math.comb(len(vertices), r)
    if total <= EXHAUSTIVE_LIMIT:
        if total == 0:
            return np.empty((0, r), dtype=np.int64), "exhaustive"
        idx = np.fromiter((x for c in combinations(range(len(vertices)), r) for x in c),
                          dtype=np.int64, count=total * r).reshape(total, r)
        return vertices[idx], "exhaustive"
    picks = np.array([rng.choice(len(vertices), size=r, replace=False) for _ in range(draws)])
    return vertices[picks], "sampled"


def _pair_codegree_matrix(g: SimpleGraph, vertices: np.ndarray, within=None) -> np.ndarray:
    rows = unpack_rows(g.bits[vertices], g.n).astype(np.float32)
    if within is not None:
        rows *= unpack_rows(within, g.n)
    # float32 sums of 0/1 values are exact below 2^24
    return (rows @ rows.T).astype(np.int64)


def _bad_subsets(g: SimpleGraph, vertices: np.ndarray, r: int, m: float,
                 rng: np.random.Generator, within=None, draws: int = SAMPLED_DRAWS):
    """r-subsets of ``vertices`` with codegree < m, as positions into ``vertices``.

    Returns (bad subsets, mode).
    """
    if r == 1:
        cd = popcount(g.bits[vertices] & within) if within is not None else popcount(g.bits[vertices])
        return np.nonzero(cd < m)[0][:, None], "exhaustive"
    if r == 2:
        cd = _pair_codegree_matrix(g, vertices, within)
        i, j = np.nonzero(np.triu(cd < m, k=1))
        return np.stack([i, j], axis=1), "exhaustive"
    pos = np.arange(len(vertices))
    subs, mode = _subsets(pos, r, rng, draws)
    if not len(subs):
        return subs, mode
    cd = np.concatenate([codegrees(g, vertices[subs[i:i + 65536]], within)
                         for i in range(0, len(subs), 65536)])
    return subs[cd < m], mode


def _greedy_cover(bad: np.ndarray, size: int) -> np.ndarray:
    """Delete, one at a time, the position in most remaining bad subsets."""
    alive = np.ones(len(bad), dtype=bool)
    removed = np.zeros(size, dtype=bool)
    if not len(bad):
        return removed
    counts = np.bincount(bad.ravel(), minlength=size)
    while alive.any():
        v = int(np.argmax(counts))
        removed[v] = True
        hit = alive & (bad == v).any(axis=1)
        counts -= np.bincount(bad[hit].ravel(), minlength=size)
        alive &= ~hit
    return removed


def _greedy_cover_pairs(bad_matrix: np.ndarray) -> np.ndarray:
    bad = bad_matrix.copy()
    deg = bad.sum(axis=1)
    removed = np.zeros(len(bad), dtype=bool)
    while deg.max(initial=0) > 0:
        v = int(np.argmax(deg))
        removed[v] = True
        deg -= bad[v]
        deg[v] = 0
        bad[v, :] = False
        bad[:, v] = False
    return removed


def _prune(g: SimpleGraph, A: np.ndarray, r: int, m: float, rng, within=None):
    """Remove vertices of A until no bad r-subset is detected; returns (U, mode)."""
    if r == 2:
        cd = _pair_codegree_matrix(g, A, within)
        bad = cd < m
        np.fill_diagonal(bad, False)
        return A[~_greedy_cover_pairs(bad)], "exhaustive"
    bad, mode = _bad_subsets(g, A, r, m, rng, within)
    return A[~_greedy_cover(bad, len(A))], mode


def verify_rich(g: SimpleGraph, U: np.ndarray, r: int, m: float, rng,
                within=None) -> tuple[bool, str, int]:
    """Check every r-subset of U has codegree >= m; returns (ok, mode, violations)."""
    U = np.asarray(U, dtype=np.int64)
    if len(U) < r:
        return True, "exhaustive", 0
    bad, mode = _bad_subsets(g, U, r, m, rng, within)
    return len(bad) == 0, mode, int(len(bad))


def drc_rich_subset(g: SimpleGraph, params: DrcParams, rng_seed, max_retries: int = 50,
                    require_guarantee: bool = False) -> Report:
    """Dependent random choice: common neighbourhood of random vertices, then pruning.

    Each attempt draws ``t_exponent`` vertices uniformly with repetition, takes
    their common neighbourhood A, deletes vertices of A until no r-subset has
    fewer than m common neighbours, and verifies the result from scratch.
    """
    params = params.with_graph(g)
    guarantee = params.guarantee()
    if require_guarantee and guarantee < params.a:
        raise PreconditionError(f"guarantee {guarantee:.4g} < a = {params.a}")
    seqs = np.random.SeedSequence(rng_seed).spawn(max_retries)
    best = {"size": -1}
    success = False
    attempt = 0
    for attempt in range(1, max_retries + 1):
        rng = np.random.default_rng(seqs[attempt - 1])
        T = rng.integers(0, g.n, size=params.t_exponent)
        A = np.nonzero(unpack_rows(g.common_row(T), g.n))[0]
        U, prune_mode = _prune(g, A, params.r, params.m, rng)
        ok, mode, violations = verify_rich(g, U, params.r, params.m, rng)
        if ok and len(U) > best["size"]:
            best = {"size": int(len(U)), "U": U.tolist(), "attempt": attempt,
                    "common_neighbourhood": int(len(A)), "verification": mode}
        if ok and len(U) >= params.a:
            success = True
            break
    p = asdict(params)
    p.update(max_retries=max_retries)
    return Report("drc_rich_subset", p, passed=success, seed=rng_seed,
                  mode=best.get("verification", "exhaustive"),
                  metrics={"guarantee": guarantee, "guaranteed": guarantee >= params.a,
                           "attempts": attempt, "size": max(best["size"], 0),
                           "U": best.get("U", [])},
                  details=[best])


def verify_proposition(g: SimpleGraph, p: int, q: int, eps: float, sample_budget: int,
                       rng_seed=0) -> Report:
    """Run the counting argument for high-degree sets on a dense graph.

    U is the set of vertices of degree >= (p/q + eps/2) n.  Every inspected
    q-subset of U must contain p+1 vertices with at least
    eps n / (4 C(q, p+1)) common neighbours.
    """
    n = g.n
    pairs = math.comb(n, 2)
    measured = g.edge_count() / pairs
    if g.edge_count() < (p / q + eps) * pairs:
        raise PreconditionError(f"density {measured:.6f} < p/q + eps = {p / q + eps:.6f}")
    if n < 3 * q / eps:
        raise PreconditionError(f"n = {n} < 3q/eps = {3 * q / eps:.1f}")
    deg = g.degrees()
    U = np.nonzero(deg >= (p / q + eps / 2) * n)[0]
    size_bound = eps * n / 3
    cd_bound = eps * n / (4 * math.comb(q, p + 1))
    rng = np.random.default_rng(rng_seed)
    if math.comb(len(U), q) <= sample_budget:
        pos = np.array(list(combinations(range(len(U)), q)), dtype=np.int64).reshape(-1, q)
        mode = "exhaustive"
    else:
        pos = np.array([rng.choice(len(U), size=q, replace=False) for _ in range(sample_budget)])
        mode = "sampled"
    qsets = U[pos] if len(pos) else pos
    best = np.zeros(len(qsets), dtype=np.int64)
    for sub in combinations(range(q), p + 1):
        if len(qsets):
            best = np.maximum(best, codegrees(g, qsets[:, list(sub)]))
    bad = np.nonzero(best < cd_bound)[0]
    size_ok = len(U) >= size_bound
    return Report("verify_proposition", {"p": p, "q": q, "eps": eps, "n": n,
                                         "sample_budget": sample_budget},
                  passed=bool(size_ok and len(bad) == 0), seed=rng_seed, mode=mode,
                  metrics={"density": measured, "U_size": int(len(U)), "size_bound": size_bound,
                           "size_ok": bool(size_ok), "codegree_bound": cd_bound,
                           "checked": int(len(qsets)), "violations": int(len(bad)),
                           "min_best_codegree": int(best.min()) if len(best) else None},
                  details=[{"qset": qsets[i].tolist(), "best_codegree": int(best[i])}
                           for i in bad[:20]])


def rich_subgraph_audit(g: SimpleGraph, s: int, eps: float, sample_budget: int = 20000,
                        rng_seed=0, max_rounds: int = 10000) -> Report:
    """Greedy peeling towards a vertex set W whose induced graph is (s, eps N)-rich.

    Codegrees are counted inside g[W].  Sets smaller than s are reported
    as empty.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    m = eps * g.n
    rng = np.random.default_rng(rng_seed)
    W = np.arange(g.n)
    mode = "exhaustive"
    for _ in range(max_rounds):
        if len(W) < s:
            W = W[:0]
            break
        within = vertex_mask(W, g.n)
        if s == 2:
            cd = _pair_codegree_matrix(g, W, within)
            bad = cd < m
            np.fill_diagonal(bad, False)
            if not bad.any():
                break
            keep = ~_greedy_cover_pairs(bad)
        else:
            bad, mode = _bad_subsets(g, W, s, m, rng, within, sample_budget)
            if not len(bad):
                break
            keep = ~_greedy_cover(bad, len(W))
        W = W[keep]
    if len(W) < s:
        W = W[:0]
    certified, cert_mode, violations = True, "exhaustive", 0
    if len(W):
        certified, cert_mode, violations = verify_rich(g, W, s, m, rng, vertex_mask(W, g.n))
    return Report("rich_subgraph_audit", {"s": s, "eps": eps, "N": g.n, "sample_budget": sample_budget},
                  passed=certified, seed=rng_seed, mode=cert_mode,
                  metrics={"size": int(len(W)), "fraction": len(W) / g.n, "threshold": m,
                           "violations": violations, "W": W.tolist()})
