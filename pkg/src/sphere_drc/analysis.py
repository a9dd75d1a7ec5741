"""Codegree kernels and geometric audits over constructed colorings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from .coloring import (SetColoring, SphereFamily, cross_adjacency, cross_sectors,
                       isomorphism_transform)
from .config import ALGEBRAIC_TOL
from .errors import PreconditionError
from .geometry import gram, root_of_unity, rotate, to_real
from .graphs import SimpleGraph, popcount, unpack_rows, vertex_mask
from .report import Report


def codegree(g: SimpleGraph, S) -> int:
    """Number of common neighbours of every vertex in S."""
    S = list(S)
    if not S:
        raise ValueError("codegree of an empty set is undefined")
    return int(popcount(g.common_row(S)))


def codegrees(g: SimpleGraph, subsets: np.ndarray, within: np.ndarray | None = None) -> np.ndarray:
    """Vectorized codegree of many equal-size subsets (rows of ``subsets``).

    ``within`` is an optional packed vertex mask restricting the counted
    neighbours (codegree inside an induced subgraph).
    """
    subsets = np.asarray(subsets, dtype=np.int64)
    rows = g.bits[subsets[:, 0]].copy()
    for c in range(1, subsets.shape[1]):
        rows &= g.bits[subsets[:, c]]
    if within is not None:
        rows &= within
    return popcount(rows)


def mean_pair_codegree(g: SimpleGraph) -> float:
    """Exact average codegree over all pairs: sum_w C(deg w, 2) / C(N, 2)."""
    deg = g.degrees().astype(np.float64)
    return float((deg * (deg - 1) / 2).sum() / math.comb(g.n, 2))


# rotation tuples ------------------------------------------------------------

@dataclass(frozen=True)
class RotationTuple:
    sphere_j: int
    vertices: tuple
    max_rotated_distance: float


def max_rotated_distance(points: np.ndarray, q: int) -> float:
    """max_{r,s} |u_r - zeta^{s-r} u_s| for u_1..u_q given as rows."""
    pts = np.asarray(points, dtype=np.complex128)
    # |u_r - zeta^{s-r} u_s| = |zeta^r u_r - zeta^s u_s|
    aligned = np.array([root_of_unity(r, q) * pts[r - 1] for r in range(1, len(pts) + 1)])
    diff = aligned[:, None, :] - aligned[None, :, :]
    return float(np.sqrt((np.abs(diff) ** 2).sum(axis=-1)).max())


def _complete_tuple(cands: list, aligned: dict, threshold: float, chosen: list):
    """Backtrack over candidate lists, one per position, keeping all pairs close."""
    pos = len(chosen)
    if pos == len(cands):
        return list(chosen)
    for v in cands[pos]:
        if v in chosen:
            continue
        a = aligned[(v, pos)]
        if all(np.linalg.norm(a - aligned[(w, i)]) < threshold for i, w in enumerate(chosen)):
            chosen.append(v)
            found = _complete_tuple(cands, aligned, threshold, chosen)
            if found:
                return found
            chosen.pop()
    return None


def _search_kdtree(pts: np.ndarray, ids: np.ndarray, q: int, threshold: float):
    real = to_real(pts)
    tree = cKDTree(real)
    for a in range(len(pts)):
        cands = []
        for r in range(1, q):
            target = to_real(rotate(pts[a], -r, q))
            cands.append(tree.query_ball_point(target, threshold))
            if not cands[-1]:
                break
        else:
            # positions 1..q-1 from the queries, position q (residue 0) is the anchor
            aligned = {(a, q - 1): real[a]}
            for pos, lst in enumerate(cands):
                for v in lst:
                    aligned[(v, pos)] = to_real(rotate(pts[v], pos + 1, q))
            found = _complete_tuple(cands + [[a]], aligned, threshold, [])
            if found:
                return [int(ids[v]) for v in found]
    return None


def _search_grid(pts: np.ndarray, ids: np.ndarray, q: int, threshold: float, k: int):
    side = threshold / (2.0 * math.sqrt(2 * k))
    buckets: dict = {}
    for s in range(q):
        keys = np.floor(to_real(rotate(pts, s, q)) / side).astype(np.int64)
        for v, key in enumerate(map(tuple, keys)):
            buckets.setdefault(key, []).append((v, s))
    for entries in buckets.values():
        if len(entries) < q:
            continue
        by_res = [[v for v, s in entries if s == r % q] for r in range(1, q + 1)]
        if any(not lst for lst in by_res):
            continue
        aligned = {(v, pos): to_real(rotate(pts[v], pos + 1, q))
                   for pos, lst in enumerate(by_res) for v in lst}
        found = _complete_tuple(by_res, aligned, threshold, [])
        if found:
            return [int(ids[v]) for v in found]
    return None


def find_rotation_tuple(family: SphereFamily, U, threshold: float,
                        method: str = "kdtree") -> RotationTuple | None:
    """Distinct u_1..u_q in one sphere with |u_r - zeta^{s-r} u_s| < threshold.

    ``kdtree`` is exhaustive: every valid tuple is found with its last member
    as the anchor.  ``grid`` only detects tuples whose aligned copies share a
    cell of side threshold / (2 sqrt(2k)) and may miss looser ones.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    q = family.q
    U = np.unique(np.asarray(list(U), dtype=np.int64))
    for j in range(family.t):
        vs = family.vertices_of(j)
        ids = U[(U >= vs.start) & (U < vs.stop)]
        if len(ids) < q:
            continue
        pts = family.points[j][ids - vs.start]
        if method == "kdtree":
            found = _search_kdtree(pts, ids, q, threshold)
        elif method == "grid":
            found = _search_grid(pts, ids, q, threshold, family.k)
        else:
            raise ValueError(f"unknown method {method!r}")
        if found:
            dist = max_rotated_distance(np.array([family.point(v) for v in found]), q)
            if dist < threshold:
                return RotationTuple(j, tuple(found), dist)
    return None


def pigeonhole_pair(positions, p: int, q: int):
    """A pair of 1-based positions whose difference mod q lies in {p, ..., q-p}."""
    for r, s in combinations(sorted(positions), 2):
        if p <= (s - r) % q <= q - p:
            return r, s
    return None


def audit_tuple_codegree(coloring: SetColoring, f: int, tup: RotationTuple, eps: float,
                         p: int | None = None) -> Report:
    """Codegree of every (p+1)-subset of a rotation tuple in color class f."""
    p = coloring.p if p is None else p
    q = coloring.q
    g = coloring.color_class(f)
    limit = eps * coloring.n
    details, worst = [], 0
    for sub in combinations(range(1, q + 1), p + 1):
        verts = [tup.vertices[i - 1] for i in sub]
        cd = codegree(g, verts)
        worst = max(worst, cd)
        pair = pigeonhole_pair(sub, p, q)
        entry = {"positions": sub, "vertices": verts, "codegree": cd}
        if pair is not None:
            pv = [tup.vertices[i - 1] for i in pair]
            entry.update(pair=pair, pair_codegree=codegree(g, pv))
        details.append(entry)
    return Report(
        "audit_tuple_codegree",
        {"f": f, "p": p, "q": q, "eps": eps, "N": coloring.n, "sphere_j": tup.sphere_j},
        passed=worst < limit,
        metrics={"max_codegree": worst, "max_codegree_over_N": worst / coloring.n,
                 "limit": limit, "subsets": len(details),
                 "max_rotated_distance": tup.max_rotated_distance},
        details=details)


# J, K and I sets -------------------------------------------------------------

def _rotated_imag(ip: np.ndarray, q: int) -> np.ndarray:
    """|Im(zeta^s z)| for every s, shape (q,) + ip.shape."""
    return np.abs(np.stack([(root_of_unity(s, q) * ip).imag for s in range(q)]))


def compute_J_set(family: SphereFamily, x, mu: float | None = None) -> np.ndarray:
    """Vertices v with |Im(zeta^s <v, x>)| >= 3 mu for every s."""
    mu = family.mu if mu is None else mu
    ip = family.all_points() @ np.conj(np.asarray(x, dtype=np.complex128))
    keep = (_rotated_imag(ip, family.q) >= 3 * mu).all(axis=0)
    return np.nonzero(keep)[0]


def compute_K_set(family: SphereFamily, y, h: int, mu: float | None = None) -> np.ndarray:
    """Vertices x of sphere h with |Im(zeta^s <x, y>)| <= 3 mu for some s."""
    mu = family.mu if mu is None else mu
    ip = family.points[h] @ np.conj(np.asarray(y, dtype=np.complex128))
    hit = (_rotated_imag(ip, family.q) <= 3 * mu).any(axis=0)
    return np.nonzero(hit)[0] + family.offsets[h]


def compute_I_set(family: SphereFamily, y, h: int, width: int | None = None) -> np.ndarray:
    """Vertices x of sphere h with arg <x, y> in the closed arc [0, 2 pi width / q].

    ``width`` defaults to the family's arc parameter.
    """
    q = family.q
    width = family.p if width is None else width
    ip = family.points[h] @ np.conj(np.asarray(y, dtype=np.complex128))
    theta = np.mod(np.angle(ip), 2 * np.pi)
    return np.nonzero(theta <= 2 * np.pi * width / q)[0] + family.offsets[h]


def j_complement_audit(family: SphereFamily, x, mu: float | None = None) -> Report:
    """Size of V \\ J(x) against the strip-measure budget 11 q eta per sphere."""
    mu = family.mu if mu is None else mu
    missing = family.N - len(compute_J_set(family, x, mu))
    budget = 11 * family.q * family.eta * family.N
    return Report("j_complement_audit", {"q": family.q, "eta": family.eta, "mu": mu, "N": family.N},
                  passed=missing <= budget,
                  metrics={"complement_size": missing, "budget": budget,
                           "complement_fraction": missing / family.N})


# centroid check -------------------------------------------------------------

def centroid_pairing_check(w_vertices, u: int, u_prime: int, ell: int, family: SphereFamily,
                           mu: float | None = None, coloring: SetColoring | None = None) -> Report:
    """Centroid of a rotation tuple against u - zeta^ell u'.

    Reports |sum w_s| with its triangle-inequality bound q * delta and the
    2 q sqrt(mu) bound, and |<centroid, u - zeta^ell u'>| against 4 mu.  With
    a coloring, also checks whether the separation hypotheses (every w_s a
    common neighbour of u and u' in color 0, inside J(u) and J(u')) hold and,
    if so, whether the inner product reaches 6 mu.
    """
    mu = family.mu if mu is None else mu
    q, p = family.q, family.p
    w = np.array([family.point(v) for v in w_vertices])
    delta = max_rotated_distance(w[np.r_[1:q, 0]], q) if q > 1 else 0.0
    total = w.sum(axis=0)
    sum_norm = float(np.linalg.norm(total))
    pu, pu2 = family.point(u), family.point(u_prime)
    diff = pu - rotate(pu2, ell, q)
    ip = complex(np.vdot(diff, total / q))  # <centroid, diff>
    ip_abs = abs(ip)
    pair_dist = float(np.linalg.norm(diff))
    metrics = {
        "sum_norm": sum_norm,
        "tuple_delta": delta,
        "triangle_bound": q * delta,
        "sum_bound": 2 * q * math.sqrt(mu),
        "pair_distance": pair_dist,
        "centroid_inner_product": ip_abs,
        "inner_product_bound": 4 * mu,
        "ell_in_range": p <= ell <= q - p,
    }
    ok = sum_norm <= q * delta + ALGEBRAIC_TOL
    if delta < 2 * math.sqrt(mu) and pair_dist < 2 * math.sqrt(mu):
        metrics["bounds_apply"] = True
        ok = ok and sum_norm < 2 * q * math.sqrt(mu) and ip_abs < 4 * mu
    else:
        metrics["bounds_apply"] = False
    if coloring is not None:
        g0 = coloring.color_class(0)
        J = set(compute_J_set(family, pu, mu)) & set(compute_J_set(family, pu2, mu))
        hyp = all(g0.has_edge(v, u) and g0.has_edge(v, u_prime) and v in J for v in w_vertices)
        metrics["separation_hypotheses"] = hyp
        if hyp:
            metrics["separation_ok"] = ip_abs >= 6 * mu
            ok = ok and metrics["separation_ok"]
    return Report("centroid_pairing_check",
                  {"w": list(w_vertices), "u": u, "u_prime": u_prime, "ell": ell, "mu": mu},
                  passed=bool(ok), metrics=metrics)


# cross degrees and isomorphism ------------------------------------------------

def _require_origin(coloring: SetColoring) -> np.ndarray:
    if coloring.vertex_origin is None:
        raise PreconditionError("coloring has no sphere structure")
    return coloring.vertex_origin


def cross_degrees(coloring: SetColoring, f: int, j: int, h: int) -> np.ndarray:
    """Neighbours in sphere h of every vertex of sphere j, in color f."""
    if j == h:
        raise ValueError("need distinct spheres")
    origin = _require_origin(coloring)
    in_j = np.nonzero(origin[:, 0] == j)[0]
    mask = vertex_mask(np.nonzero(origin[:, 0] == h)[0], coloring.n)
    return popcount(coloring.colors[f % coloring.q][in_j] & mask)


def min_cross_degree(coloring: SetColoring, f: int, j: int, h: int) -> int:
    return int(cross_degrees(coloring, f, j, h).min())


def _bipartite_block(adj: np.ndarray, origin: np.ndarray, j: int) -> np.ndarray:
    in_j = origin[:, 0] == j
    return adj[np.ix_(in_j, ~in_j)]


def isomorphism_check(family: SphereFamily, coloring: SetColoring, f: int, j: int) -> bool:
    """Color f rebuilt from rotated points equals G_0 on V^(j) x (V \\ V^(j)), bit for bit."""
    origin = _require_origin(coloring)
    moved = isomorphism_transform(family, f, j)
    rebuilt = cross_adjacency(moved, f, cross_sectors(moved))
    if coloring.params.get("complemented"):
        rebuilt = ~rebuilt
    g0 = unpack_rows(coloring.colors[0], coloring.n)
    return bool(np.array_equal(_bipartite_block(rebuilt, origin, j), _bipartite_block(g0, origin, j)))


def plant_rotated_copy(family: SphereFamily, j: int, src: int, dst: int, ell: int) -> SphereFamily:
    """Replace point ``dst`` of sphere j by zeta^{-ell} times point ``src``.

    The planted pair (u, u') then satisfies u = zeta^ell u' exactly.
    """
    pts = [v.copy() for v in family.points]
    pts[j][dst] = rotate(pts[j][src], -ell, family.q)
    return family.with_points(pts)


def cross_pair_density(coloring: SetColoring, f: int) -> float:
    origin = _require_origin(coloring)
    cross = origin[:, 0][:, None] != origin[:, 0][None, :]
    adj = unpack_rows(coloring.colors[f % coloring.q], coloring.n)
    return float(adj[cross].mean())


def inner_products(family: SphereFamily, x) -> np.ndarray:
    """<v, x> for every vertex v."""
    return gram(family.all_points(), np.atleast_2d(x))[:, 0]
