"""Complex unit-sphere primitives.

Points of the complex sphere S^{k-1}(C) are handled as complex numpy arrays of
shape ``(k,)`` (one point) or ``(count, k)`` (many points).  ``UnitVector`` is a
thin validated wrapper for single points; every function below also accepts
raw arrays.  The real embedding interleaves real and imaginary parts,
``(x1 + i y1, ..., xk + i yk) -> (x1, y1, ..., xk, yk)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ALGEBRAIC_TOL

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class UnitVector:
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.complex128).reshape(-1)
        if z.size < 1:
            raise ValueError("dim_k must be >= 1")
        norm2 = float(np.vdot(z, z).real)
        if abs(norm2 - 1.0) > ALGEBRAIC_TOL:
            raise ValueError(f"not a unit vector: |z|^2 = {norm2!r}")
        object.__setattr__(self, "z", z)

    @classmethod
    def from_coords(cls, coords) -> "UnitVector":
        return cls(from_real(np.asarray(coords, dtype=np.float64)))

    @property
    def dim_k(self) -> int:
        return self.z.size

    @property
    def coords(self) -> np.ndarray:
        return to_real(self.z)

    def __eq__(self, other):
        return isinstance(other, UnitVector) and np.array_equal(self.z, other.z)

    def __hash__(self):
        return hash(self.z.tobytes())


@dataclass(frozen=True)
class PhaseArc:
    """Half-open arc [2 pi f/q, 2 pi (f+p)/q) of arguments, taken mod 2 pi."""

    f: int
    p: int
    q: int

    def __post_init__(self):
        if not (1 <= self.p < self.q):
            raise ValueError(f"need 1 <= p < q, got p={self.p}, q={self.q}")
        object.__setattr__(self, "f", self.f % self.q)

    @property
    def start(self) -> float:
        return TWO_PI * self.f / self.q

    @property
    def length(self) -> float:
        return TWO_PI * self.p / self.q


def _as_complex(x) -> np.ndarray:
    if isinstance(x, UnitVector):
        return x.z
    return np.asarray(x, dtype=np.complex128)


def to_real(z) -> np.ndarray:
    """Interleave re/im parts along the last axis."""
    z = _as_complex(z)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],), dtype=np.float64)
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def from_real(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] % 2:
        raise ValueError("real coordinate count must be even")
    return x[..., 0::2] + 1j * x[..., 1::2]


def inner_product(x, y) -> complex:
    """<x, y> = sum_j x_j conj(y_j)."""
    x, y = _as_complex(x), _as_complex(y)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return complex(np.sum(x * np.conj(y)))


def gram(xs, ys) -> np.ndarray:
    """Matrix of inner products <xs[r], ys[s]>."""
    xs, ys = _as_complex(xs), _as_complex(ys)
    if xs.shape[-1] != ys.shape[-1]:
        raise ValueError(f"dimension mismatch: {xs.shape[-1]} vs {ys.shape[-1]}")
    return xs @ ys.conj().T


def root_of_unity(s: int, q: int) -> complex:
    """zeta^s with zeta = exp(2 pi i / q); exact for the quarter turns."""
    if q < 1:
        raise ValueError("q must be >= 1")
    s %= q
    # exact values keep rotate(rotate(x, s), q - s) == x bit-stable in common cases
    if (4 * s) % q == 0:
        return (1, 1j, -1, -1j)[(4 * s) // q]
    return complex(np.exp(1j * TWO_PI * s / q))


def rotate(x, s: int, q: int):
    """Multiply every complex coordinate by zeta^s."""
    w = root_of_unity(s, q)
    if isinstance(x, UnitVector):
        return UnitVector(w * x.z)
    return w * _as_complex(x)


def canonical_arg(z) -> np.ndarray | float:
    """Argument of z in [0, 2 pi)."""
    z = np.asarray(z, dtype=np.complex128)
    theta = np.arctan2(z.imag, z.real)
    theta = np.where(theta < 0.0, theta + TWO_PI, theta)
    # theta + 2 pi can round up to exactly 2 pi for tiny negative angles
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    return float(theta) if theta.ndim == 0 else theta


def phase_sector(z, q: int) -> np.ndarray | int:
    """Index s in [0, q) of the sector [2 pi s/q, 2 pi (s+1)/q) holding arg z.

    Arc membership is decided from this integer only, which makes the q arcs
    of a coloring agree with each other exactly.
    """
    theta = np.asarray(canonical_arg(z))
    sector = np.floor(theta * (q / TWO_PI)).astype(np.int64)
    sector = np.where(sector >= q, 0, sector)
    return int(sector) if sector.ndim == 0 else sector


def arc_contains(arc: PhaseArc, z) -> bool:
    z = complex(z)
    if z == 0:
        raise ValueError("arg of 0 is undefined")
    return (phase_sector(z, arc.q) - arc.f) % arc.q < arc.p


def check_inner_product_identities(x, y, theta: float) -> dict:
    """Evaluate both phase identities for the imaginary part of <x, y>.

    Im<x, -e^{i theta} y> = Im(-e^{-i theta} <x, y>)
    Im(e^{i theta} <x, y>) = -Im(e^{-i theta} <y, x>)
    """
    x, y = _as_complex(x), _as_complex(y)
    e = np.exp(1j * theta)
    xy = inner_product(x, y)
    r1 = abs(inner_product(x, -e * y).imag - (-np.conj(e) * xy).imag)
    r2 = abs((e * xy).imag + (np.conj(e) * inner_product(y, x)).imag)
    return {"residuals": (float(r1), float(r2)),
            "pass": bool(r1 < ALGEBRAIC_TOL and r2 < ALGEBRAIC_TOL)}


def sample_uniform(k: int, count: int, rng_seed) -> np.ndarray:
    """i.i.d. uniform points on S^{k-1}(C), shape (count, k).

    ``rng_seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if k < 1 or count < 1:
        raise ValueError("need k >= 1 and count >= 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    g = rng.standard_normal((count, 2 * k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return from_real(g)
