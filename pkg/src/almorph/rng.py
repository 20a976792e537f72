"""Deterministic seed derivation shared by splitting, sampling, and the driver.

All stochastic behaviour in the package flows through `rng_for`, which mixes
an arbitrary tuple of 64-bit integers (master seed, seed index, strategy
ordinal, cycle number, ...) into a single seed with a splitmix64-style
finalizer.  Mixing is associative-free by design: `mix(a, b)` differs from
`mix(b, a)`, so every consumer gets an independent, order-stable stream and
runs can be re-executed in isolation without disturbing each other.
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 finalization round over a 64-bit state."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix(*parts: int) -> int:
    """Fold any number of integers into one well-scrambled 64-bit seed."""
    acc = 0
    for p in parts:
        acc = splitmix64(acc ^ (p & _MASK64))
    return acc


def rng_for(*parts: int) -> random.Random:
    """A fresh PRNG keyed by the mixed parts; equal parts, equal stream."""
    return random.Random(mix(*parts))
