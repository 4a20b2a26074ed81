"""Seeded 64-bit PCG-style random generator used for every stochastic step.

The generator is PCG-XSH-RR 64/32 ("pcg32"): 64-bit LCG state with
multiplier 6364136223846793005, output = 32-bit xorshift-high followed by a
random rotation.  Seeding follows the reference `pcg32_srandom_r` routine:

    state = 0; inc = (stream << 1) | 1
    step(); state += seed; step()

Integers below a bound are drawn as ``next32() % n`` (the modulo bias is
below 2**-32 * n, irrelevant for the collection sizes handled here).  The
Fisher-Yates shuffle consumes one bounded draw per position, high index
first, so any re-implementation of this docstring reproduces `shuffle`
exactly.
"""

from __future__ import annotations

_MULT = 6364136223846793005
_MASK64 = (1 << 64) - 1


class Pcg32:
    """pcg32 stream; deterministic for a fixed (seed, stream) pair."""

    def __init__(self, seed: int, stream: int = 0):
        self.state = 0
        self.inc = (((stream << 1) | 1)) & _MASK64
        self._step()
        self.state = (self.state + (seed & _MASK64)) & _MASK64
        self._step()

    def _step(self) -> None:
        self.state = (self.state * _MULT + self.inc) & _MASK64

    def next32(self) -> int:
        old = self.state
        self._step()
        xorshifted = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & 0xFFFFFFFF

    def below(self, n: int) -> int:
        """Uniform int in [0, n)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next32() % n

    def uniform(self) -> float:
        """Uniform float in [0, 1)."""
        return self.next32() / 4294967296.0

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, high index down to 1."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
