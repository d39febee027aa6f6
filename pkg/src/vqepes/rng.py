"""Deterministic 64-bit generator used everywhere randomness is needed.

This is SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
generators", OOPSLA 2014): output k is a fixed bit-mixing function of
seed + (k+1) * 0x9E3779B97F4A7C15, so streams are reproducible bit-for-bit
across platforms and batch draws vectorize as pure functions of the counter.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_DOUBLE_SCALE = 2.0**-53


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * _MIX1 & _MASK
    z = (z ^ (z >> 27)) * _MIX2 & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Seeded stream of 64-bit outputs with scalar and batch draws."""

    __slots__ = ("seed", "_count")

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._count = 0

    def next_uint64(self) -> int:
        self._count += 1
        return _mix((self.seed + self._count * _GAMMA) & _MASK)

    def _next_block(self, n: int) -> np.ndarray:
        counters = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        return _mix_array(np.uint64(self.seed) + counters * np.uint64(_GAMMA))

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u = (self.next_uint64() >> 11) * _DOUBLE_SCALE
        return low + u * (high - low)

    def uniforms(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        u = (self._next_block(n) >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE
        return low + u * (high - low)

    def rademacher(self, n: int) -> np.ndarray:
        """n independent +/-1 draws (sign bit of the raw output)."""
        bits = (self._next_block(n) >> np.uint64(63)).astype(np.int64)
        return (2 * bits - 1).astype(np.float64)
