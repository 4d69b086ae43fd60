"""Portable seeded random number generation.

Everything stochastic in this package (synthetic panels, entity splits) runs
on SplitMix64 so that a given seed produces the same stream on any platform
or language.  The generator state is a single 64-bit integer and one step is:

    state   = (state + 0x9E3779B97F4A7C15) mod 2^64
    z       = state
    z       = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z       = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output  = z XOR (z >> 31)

Derived quantities are defined exactly in terms of that 64-bit output:

    uniform()     = (output >> 11) * 2^-53                 (double in [0, 1))
    randrange(n)  = (output * n) >> 64                     (integer in [0, n))
    poisson(lam)  = Knuth's product-of-uniforms method

Per-entity substreams are seeded as ``substream(seed, k)`` = first output of
a SplitMix64 generator whose state is ``seed XOR ((k + 1) * 0x9E3779B97F4A7C15
mod 2^64)``, so entities can be generated independently (or in parallel)
without changing the stream each one sees.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 stream seeded with a 64-bit integer."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Double in [0, 1) with 53 bits of precision."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Integer in [0, n) via the multiply-shift reduction."""
        if n <= 0:
            raise ValueError("randrange requires n >= 1")
        return (self.next_uint64() * n) >> 64

    def poisson(self, lam: float) -> int:
        """Poisson draw by Knuth's method; suitable for small means."""
        if lam <= 0.0:
            return 0
        threshold = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= self.uniform()
            if p <= threshold:
                return k
            k += 1

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]


def substream(seed: int, index: int) -> SplitMix64:
    """Independent stream for item ``index`` under a dataset-level seed."""
    child_seed = SplitMix64((seed ^ ((index + 1) * _GOLDEN)) & _MASK64).next_uint64()
    return SplitMix64(child_seed)
