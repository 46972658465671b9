"""Seeded pseudo-random numbers with a portable, documented algorithm.

Sampled initial conditions must be reproducible bit-for-bit across runs,
platforms, and reimplementations in other languages, so instead of relying
on numpy's generator (whose stream is an implementation detail) this module
implements SplitMix64: a 64-bit state advanced by the additive constant
0x9E3779B97F4A7C15, with the output mixed by two xor-shift multiplies.
Doubles are produced from the top 53 bits of the output word.

Child generators for independent work items are derived from (seed, index)
so that parallel sweeps give identical results regardless of scheduling.
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 generator over a 64-bit state."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi), from the top 53 bits of one output."""
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u


def child_seed(seed: int, index: int) -> int:
    """Derive a decorrelated 64-bit seed for work item ``index``."""
    s = (seed + (index + 1) * _GAMMA) & _MASK
    return SplitMix64(s).next_u64()


def child_rng(seed: int, index: int) -> SplitMix64:
    """Generator for work item ``index`` of a sweep seeded with ``seed``."""
    return SplitMix64(child_seed(seed, index))
