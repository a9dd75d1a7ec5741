"""Recursive zonal equal-area partition of the real sphere S^d.

The sphere is cut into a north polar cap, a stack of collars and a south
polar cap.  Cap colatitudes are solved from the normalized cap measure so
that every collar holds an integral number of ideal regions; each collar is
then split by recursively partitioning S^{d-1}.  Because the spherical
measure factorizes as ``sin^{d-1}(theta) d theta x dsigma_{d-1}``, every
region has measure exactly 1/n up to root-finding error.

Points are located by nested cap / collar / sector tests on the first
coordinate (the polar axis) and the normalized remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc, betaincinv, gammaln

from .geometry import TWO_PI, UnitVector, from_real, to_real


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^d in R^{d+1}."""
    return math.exp(math.log(2.0) + 0.5 * (d + 1) * math.log(math.pi) - gammaln(0.5 * (d + 1)))


def cap_measure(d: int, theta):
    """Normalized measure of the cap of colatitude ``theta`` on S^d."""
    theta = np.asarray(theta, dtype=np.float64)
    folded = np.minimum(theta, math.pi - theta)
    half = 0.5 * betainc(0.5 * d, 0.5, np.sin(folded) ** 2)
    return np.where(theta <= 0.5 * math.pi, half, 1.0 - half)


def cap_colatitude(d: int, measure: float) -> float:
    """Inverse of :func:`cap_measure`."""
    if measure <= 0.0:
        return 0.0
    if measure >= 1.0:
        return math.pi
    m = min(measure, 1.0 - measure)
    theta = math.asin(math.sqrt(betaincinv(0.5 * d, 0.5, 2.0 * m)))
    if measure > 0.5:
        theta = math.pi - theta
    # Newton polish; d/dtheta of cap_measure is sin^{d-1}/B(d/2, 1/2)
    log_b = gammaln(0.5 * d) + gammaln(0.5) - gammaln(0.5 * d + 0.5)
    for _ in range(3):
        s = math.sin(theta)
        if s <= 0.0:
            break
        deriv = math.exp((d - 1) * math.log(s) - log_b)
        step = (float(cap_measure(d, theta)) - measure) / deriv
        if not math.isfinite(step) or abs(step) > 0.1:
            break
        theta = min(max(theta - step, 0.0), math.pi)
    return theta


def _chord(angle: float) -> float:
    return 2.0 * math.sin(min(angle, math.pi) / 2.0)


@dataclass
class _Zones:
    """Partition tree node for S^d split into n regions."""

    d: int
    n: int
    caps: np.ndarray = field(default=None)  # zone upper colatitudes, last = pi
    counts: list = field(default_factory=list)  # regions per zone
    children: list = field(default_factory=list)  # _Zones per zone, None for polar caps
    offsets: list = field(default_factory=list)


def _round_to_naturals(ideal):
    out, carry = [], 0.0
    for r in ideal:
        k = int(round(r + carry))
        carry += r - k
        out.append(k)
    return out


def _build(d: int, n: int) -> _Zones:
    node = _Zones(d, n)
    if n == 1 or d == 1:
        return node
    region_area = sphere_area(d) / n
    if n == 2:
        polar = 0.5 * math.pi
        n_collars = 0
    else:
        polar = cap_colatitude(d, 1.0 / n)
        collar_angle = region_area ** (1.0 / d)
        n_collars = max(1, int(round((math.pi - 2.0 * polar) / collar_angle)))
    ideal = [1.0]
    if n_collars:
        width = (math.pi - 2.0 * polar) / n_collars
        for i in range(1, n_collars + 1):
            lo, hi = polar + (i - 1) * width, polar + i * width
            ideal.append(float(cap_measure(d, hi) - cap_measure(d, lo)) * n)
    ideal.append(1.0)
    counts = _round_to_naturals(ideal)
    caps, subtotal = [], 0
    for c in counts[:-1]:
        subtotal += c
        caps.append(polar if subtotal == 1 else cap_colatitude(d, subtotal / n))
    caps.append(math.pi)
    node.caps = np.array(caps)
    node.counts = counts
    offset = 0
    for i, c in enumerate(counts):
        node.offsets.append(offset)
        polar_zone = i == 0 or i == len(counts) - 1
        node.children.append(None if polar_zone or c == 0 else _build(d - 1, c))
        offset += c
    assert offset == n
    return node


def _regions(node: _Zones):
    """Yield (measure, center, diameter_bound) in region-id order."""
    d, n = node.d, node.n
    if n == 1:
        center = np.zeros(d + 1)
        center[0] = 1.0
        yield 1.0, center, 2.0
        return
    if d == 1:
        width = TWO_PI / n
        for i in range(n):
            phi = (i + 0.5) * width
            yield 1.0 / n, np.array([math.cos(phi), math.sin(phi)]), _chord(width)
        return
    lo = 0.0
    last = len(node.counts) - 1
    for i, (hi, c) in enumerate(zip(node.caps, node.counts)):
        if c == 0:
            lo = hi
            continue
        zone_measure = float(cap_measure(d, hi) - cap_measure(d, lo))
        if i == 0 or i == last:
            center = np.zeros(d + 1)
            center[0] = 1.0 if i == 0 else -1.0
            rim = hi if i == 0 else math.pi - lo
            diam = 2.0 * math.sin(rim) if rim <= 0.5 * math.pi else 2.0
            yield zone_measure, center, diam
        else:
            mid = 0.5 * (lo + hi)
            max_sin = 1.0 if lo <= 0.5 * math.pi <= hi else max(math.sin(lo), math.sin(hi))
            for sub_measure, sub_center, sub_diam in _regions(node.children[i]):
                center = np.concatenate([[math.cos(mid)], math.sin(mid) * sub_center])
                diam = min(2.0, _chord(hi - lo) + max_sin * sub_diam)
                yield zone_measure * sub_measure, center, diam
        lo = hi


def _locate(node: _Zones, x: np.ndarray) -> np.ndarray:
    n = node.n
    ids = np.zeros(len(x), dtype=np.int64)
    if n == 1 or len(x) == 0:
        return ids
    if node.d == 1:
        phi = np.arctan2(x[:, 1], x[:, 0])
        phi = np.where(phi < 0.0, phi + TWO_PI, phi)
        return np.minimum(np.floor(phi * (n / TWO_PI)).astype(np.int64), n - 1)
    theta = np.arccos(np.clip(x[:, 0], -1.0, 1.0))
    zone = np.searchsorted(node.caps, theta, side="left")
    zone = np.minimum(zone, len(node.caps) - 1)
    # empty zones have zero width, points never land strictly inside them
    for i, child in enumerate(node.children):
        sel = np.nonzero(zone == i)[0]
        if not len(sel):
            continue
        if child is None:
            ids[sel] = node.offsets[i]
            continue
        rest = x[sel, 1:]
        norms = np.linalg.norm(rest, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        ids[sel] = node.offsets[i] + _locate(child, rest / norms)
    return ids


@dataclass(frozen=True)
class PartitionRegion:
    id: int
    center: np.ndarray  # real coordinates on S^{real_dim - 1}
    measure: float
    diameter_bound: float

    def center_vector(self) -> UnitVector:
        """Region center as a point of the complex sphere (even real_dim only)."""
        return UnitVector(from_real(self.center))


class EqualAreaPartition:
    """Equal-area partition of S^{real_dim-1} into n regions."""

    def __init__(self, real_dim: int, n: int):
        if real_dim < 2:
            raise ValueError("real_dim must be >= 2")
        if n < 1:
            raise ValueError("n must be >= 1")
        self.real_dim = real_dim
        self.n = n
        self._root = _build(real_dim - 1, n)
        self.regions = [PartitionRegion(i, c, m, b)
                        for i, (m, c, b) in enumerate(_regions(self._root))]
        assert len(self.regions) == n

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.regions)

    def locate(self, points) -> np.ndarray:
        """Region id of each real point (rows of shape (m, real_dim)).

        Complex input of shape (m, real_dim/2) is embedded first.
        """
        x = np.asarray(points)
        if np.iscomplexobj(x):
            x = to_real(x)
        x = np.atleast_2d(x).astype(np.float64)
        if x.shape[1] != self.real_dim:
            raise ValueError(f"expected {self.real_dim} real coordinates, got {x.shape[1]}")
        return _locate(self._root, x)

    def centers(self) -> np.ndarray:
        return np.array([r.center for r in self.regions])

    def measures(self) -> np.ndarray:
        return np.array([r.measure for r in self.regions])


def equal_area_partition(real_dim: int, n: int) -> list[PartitionRegion]:
    return EqualAreaPartition(real_dim, n).regions
