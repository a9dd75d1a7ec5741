"""Monte Carlo measures of strips and caps on S^{k-1}(C), plus 1-D oracles.

Both sets are defined by a single real linear functional of y (Im<x, y> for
the strip, Re<c, y> for the cap), and such a functional of a uniform point
of S^{2k-1} has density ``c_d (1 - t^2)^{(d-3)/2}`` on [-1, 1] with d = 2k.
The oracles integrate that density numerically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erf, gammaln

from .geometry import sample_uniform

CHUNK = 1 << 16


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    stderr: float
    samples: int
    bound: float | None = None

    @classmethod
    def from_count(cls, hits: int, samples: int, bound: float | None = None) -> "MeasureEstimate":
        value = hits / samples
        return cls(value, math.sqrt(value * (1.0 - value) / samples), samples, bound)

    def within(self, target: float, sigmas: float) -> bool:
        # a zero stderr (value 0 or 1) still allows the binomial resolution 1/samples
        return abs(self.value - target) <= sigmas * max(self.stderr, 1.0 / self.samples)


def coordinate_density(t, k: int):
    """Density of one real coordinate of a uniform point of S^{2k-1}."""
    d = 2 * k
    log_c = gammaln(d / 2) - 0.5 * math.log(math.pi) - gammaln((d - 1) / 2)
    t = np.asarray(t, dtype=np.float64)
    return np.exp(log_c) * np.clip(1.0 - t * t, 0.0, None) ** ((d - 3) / 2)


def coordinate_mass(lo: float, hi: float, k: int) -> float:
    lo, hi = max(lo, -1.0), min(hi, 1.0)
    if hi <= lo:
        return 0.0
    val, _ = integrate.quad(lambda s: float(coordinate_density(s, k)), lo, hi,
                            epsabs=1e-13, epsrel=1e-11, limit=200)
    return val


def strip_threshold(k: int, nu: float) -> float:
    return nu / math.sqrt(2 * k)


def strip_oracle(k: int, nu: float) -> float:
    c = strip_threshold(k, nu)
    return min(1.0, coordinate_mass(-c, c, k))


def strip_gaussian_approx(nu: float) -> float:
    """Strip measure if Im<x, y> were exactly N(0, 1/(2k)): 2 Phi(nu) - 1."""
    return float(erf(nu / math.sqrt(2.0)))


def cap_oracle(k: int, radius: float) -> float:
    # |c - y|^2 = 2 - 2 Re<c, y>
    return min(1.0, coordinate_mass(1.0 - radius * radius / 2.0, 1.0, k))


def strip_cap_radius(k: int, nu: float) -> float:
    """Radius of the cap around -i x used to bound the strip measure."""
    return math.sqrt(2.0) - nu / math.sqrt(2 * k)


def cap_lower_bound(nu: float) -> float:
    return 0.5 - math.sqrt(2.0) * nu


def _count(k: int, samples: int, rng_seed, stat, threads: int) -> int:
    """Sum of ``stat(chunk)`` over uniform samples drawn in fixed-size seeded chunks."""
    root = np.random.SeedSequence(rng_seed)
    center_seq, body_seq = root.spawn(2)
    center = sample_uniform(k, 1, np.random.default_rng(center_seq))[0]
    sizes = [CHUNK] * (samples // CHUNK) + ([samples % CHUNK] if samples % CHUNK else [])
    seqs = body_seq.spawn(len(sizes))

    def one(i):
        y = sample_uniform(k, sizes[i], np.random.default_rng(seqs[i]))
        return int(stat(center, y))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return sum(pool.map(one, range(len(sizes))))
    return sum(one(i) for i in range(len(sizes)))


def estimate_strip_measure(k: int, nu: float, samples: int, rng_seed, threads: int = 1) -> MeasureEstimate:
    """Fraction of uniform y with |Im<x, y>| <= nu / sqrt(2k) for a fixed x."""
    if k < 1 or samples < 1:
        raise ValueError("need k >= 1 and samples >= 1")
    c = strip_threshold(k, nu)

    def stat(x, y):
        ip = np.conj(y @ np.conj(x))  # <x, y>
        return np.count_nonzero(np.abs(ip.imag) <= c)

    return MeasureEstimate.from_count(_count(k, samples, rng_seed, stat, threads), samples, 3.0 * nu)


def estimate_cap_measure(k: int, radius: float, samples: int, rng_seed, threads: int = 1,
                         bound: float | None = None) -> MeasureEstimate:
    """Fraction of uniform y with |c - y| <= radius for a fixed center c."""
    if not 0.0 < radius <= 2.0:
        raise ValueError("radius must lie in (0, 2]")
    r2 = radius * radius

    def stat(c, y):
        return np.count_nonzero((np.abs(y - c) ** 2).sum(axis=1) <= r2)

    return MeasureEstimate.from_count(_count(k, samples, rng_seed, stat, threads), samples, bound)
