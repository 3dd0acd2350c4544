"""Seeded SplitMix64 stream, vectorised over its counter.

The n-th output (1-based) of a stream seeded with s is mix(s + n * GAMMA)
modulo 2**64, so blocks of outputs are computed in one numpy pass and match
the scalar generator bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_TWO_PI = 2.0 * np.pi


def splitmix64_scalar(state: int) -> tuple[int, int]:
    """Reference step: returns (new_state, output)."""
    state = (state + GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit generator with uniform and Gaussian helpers."""

    def __init__(self, seed: int):
        self._state = int(seed) & MASK64

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs."""
        if n <= 0:
            return np.zeros(0, dtype=np.uint64)
        counters = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self._state) + counters * _GAMMA
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
            z = z ^ (z >> np.uint64(31))
        self._state = (self._state + n * GAMMA) & MASK64
        return z

    def uniform(self, n: int) -> np.ndarray:
        """Uniform floats in [0, 1) from the top 53 bits."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def normal(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller over consecutive uniform pairs.

        Pair k yields a cosine sample (returned first, in pair order) and a sine
        sample (returned after all cosine samples); the stream advances by
        2 * ceil(n / 2) outputs.
        """
        if n <= 0:
            return np.zeros(0, dtype=np.float64)
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
        u2 = u[1::2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = _TWO_PI * u2
        return np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
