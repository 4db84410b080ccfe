"""Seedable randomness for the private mechanisms.

Every draw is addressed by a stream id ``(tag, vertex, round, index)`` and is
computed by hashing that id together with the seed (a splitmix64 chain), so a
draw never depends on how many other draws happened before it. This is what
lets vertices be simulated in any order, in bulk with numpy, or inside the
compiled kernels while producing bit-identical results.

Uniforms are mapped to Laplace and geometric variates by inverse CDF.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_NEG_53 = 2.0**-53


def mix64(z):
    """splitmix64 finalizer on a uint64 scalar or array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _absorb(h, x):
    x = np.asarray(x, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        return mix64(h + (x + np.uint64(1)) * GOLDEN)


def tag_hash(tag: str) -> int:
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=8).digest(), "little")


def stream_base(seed: int, tag: str, rnd: int = 0) -> np.uint64:
    """Hash state after absorbing ``(seed, tag, round)``.

    The compiled kernels receive this value and finish the chain with
    ``vertex`` and ``index`` themselves.
    """
    h = mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(tag_hash(tag)))
    return np.uint64(_absorb(h, rnd))


def hash_to_uniform(h):
    """Map uint64 hashes to floats in the open interval (0, 1)."""
    return ((np.asarray(h, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_NEG_53


def uniform_from_base(base, vertex, index=0):
    return hash_to_uniform(_absorb(_absorb(base, vertex), index))


def laplace_from_uniform(u, b: float):
    u = np.asarray(u, dtype=np.float64)
    return np.where(u < 0.5, b * np.log(2.0 * u), -b * np.log(2.0 * (1.0 - u)))


def geometric_from_uniform(u, q):
    """Geom(q) on {1, 2, ...} with Pr[G = 1] = q; returns float (inf when q == 0)."""
    u = np.asarray(u, dtype=np.float64)
    q = np.broadcast_to(np.asarray(q, dtype=np.float64), u.shape)
    out = np.full(u.shape, np.inf)
    full = q >= 1.0
    out[full] = 1.0
    mid = (q > 0.0) & ~full
    out[mid] = 1.0 + np.floor(np.log(u[mid]) / np.log1p(-q[mid]))
    return out


def _check_scale(b: float) -> None:
    if not b > 0:
        raise ValueError(f"Laplace scale must be positive, got {b!r}")


def laplace_le_prob(threshold, b: float):
    """Pr[Lap(b) <= threshold], elementwise."""
    _check_scale(b)
    t = np.asarray(threshold, dtype=np.float64)
    with np.errstate(over="ignore"):
        out = np.where(t >= 0, 1.0 - 0.5 * np.exp(-np.abs(t) / b), 0.5 * np.exp(-np.abs(t) / b))
    return out if out.ndim else float(out)


class NoiseSource:
    """Randomness contract shared by every mechanism.

    Args:
        seed: integer seed; ignored in zero-noise mode.
        zero_noise: when set, every Laplace draw is exactly 0 and geometric
            draws return ``ceil(1/q)``.
    """

    def __init__(self, seed: int = 0, zero_noise: bool = False):
        self.seed = int(seed)
        self.zero_noise = bool(zero_noise)

    @classmethod
    def zero(cls) -> "NoiseSource":
        return cls(0, zero_noise=True)

    def __repr__(self) -> str:
        if self.zero_noise:
            return "NoiseSource(zero_noise=True)"
        return f"NoiseSource(seed={self.seed})"

    def derive(self, trial: int) -> "NoiseSource":
        """Independent source for trial ``trial`` (seed = hash(seed, trial))."""
        h = _absorb(mix64(np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF)), trial)
        return NoiseSource(int(h) & 0x7FFFFFFFFFFFFFFF, self.zero_noise)

    def base(self, tag: str, rnd: int = 0) -> np.uint64:
        return stream_base(self.seed, tag, rnd)

    def uniform(self, tag: str, vertex=0, rnd: int = 0, index=0):
        vertex, index = np.broadcast_arrays(np.asarray(vertex), np.asarray(index))
        u = uniform_from_base(self.base(tag, rnd), vertex, index)
        return u if u.ndim else float(u)

    def laplace(self, b: float, tag: str, vertex=0, rnd: int = 0, index=0):
        _check_scale(b)
        if self.zero_noise:
            z = np.zeros(np.broadcast(np.asarray(vertex), np.asarray(index)).shape)
            return z if z.ndim else 0.0
        x = laplace_from_uniform(self.uniform(tag, vertex, rnd, index), b)
        return x if x.ndim else float(x)

    def geometric(self, q, tag: str, vertex=0, rnd: int = 0, index=0):
        """Geometric draw on {1, 2, ...}; ``inf`` marks q == 0 ("never")."""
        q = np.asarray(q, dtype=np.float64)
        if np.any(q < 0) or np.any(q > 1):
            raise ValueError("geometric success probability must lie in [0, 1]")
        if self.zero_noise:
            with np.errstate(divide="ignore"):
                g = np.where(q > 0, np.ceil(1.0 / np.where(q > 0, q, 1.0)), np.inf)
            g = np.broadcast_to(g, np.broadcast(q, np.asarray(vertex), np.asarray(index)).shape)
            return g if g.ndim else float(g)
        u = self.uniform(tag, vertex, rnd, index)
        shape = np.broadcast(np.asarray(u), q).shape
        g = geometric_from_uniform(np.broadcast_to(u, shape), q)
        return g if g.ndim else float(g)

    def le_prob(self, threshold, b: float):
        """Pr[noise <= threshold] for this source's Laplace(b).

        In zero-noise mode the noise is a point mass at 0.
        """
        _check_scale(b)
        if self.zero_noise:
            out = (np.asarray(threshold, dtype=np.float64) >= 0).astype(np.float64)
            return out if out.ndim else float(out)
        return laplace_le_prob(threshold, b)


def laplace(src: NoiseSource, b: float, tag: str = "laplace", vertex=0, rnd: int = 0, index=0):
    return src.laplace(b, tag, vertex, rnd, index)


def geometric(src: NoiseSource, q, tag: str = "geometric", vertex=0, rnd: int = 0, index=0):
    if np.any(np.asarray(q) <= 0):
        raise ValueError("q <= 0: the event never happens; callers schedule 'never'")
    return src.geometric(q, tag, vertex, rnd, index)


def laplace_tail(b: float, beta: float) -> float:
    """Radius r with Pr[|Lap(b)| > r] = beta (the standard tail bound is tight)."""
    _check_scale(b)
    return b * math.log(1.0 / beta)
