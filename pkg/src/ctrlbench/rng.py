"""Seeded, portable random generator for batteries and simulators.

Trial plans and simulated sessions must be reproducible bit-for-bit across
runs and across implementations, so the generator is pinned here instead of
delegating to a host RNG:

* state update: splitmix-style — add the 64-bit golden-ratio constant, then
  two xor-shift-multiply finalization rounds;
* floats in [0, 1): top 53 bits of the output word;
* bounded integers: rejection sampling (no modulo bias);
* gaussians: one fresh Box-Muller pair per call (cosine branch), so the
  stream position is a pure function of the call count.
"""

from __future__ import annotations

import math

from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit generator with a documented update rule."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise DomainError(f"bound must be positive, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, descending index order."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        if sigma < 0:
            raise DomainError(f"sigma must be >= 0, got {sigma}")
        u1 = self.next_float()
        while u1 == 0.0:
            u1 = self.next_float()
        u2 = self.next_float()
        r = math.sqrt(-2.0 * math.log(u1))
        return mu + sigma * r * math.cos(2.0 * math.pi * u2)


def derive_seed(seed: int, *indices: int) -> int:
    """Stable child seed for (seed, index path); used for per-trial streams."""
    g = SplitMix64(seed)
    out = g.next_u64()
    for idx in indices:
        g = SplitMix64((out ^ (idx * _GOLDEN)) & _MASK64)
        out = g.next_u64()
    return out
