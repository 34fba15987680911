"""Portable seeded RNG and seed derivation.

Everything downstream (k-means init, Gibbs chains, fold-in) draws from this
splitmix64 generator, so runs are reproducible bit-for-bit across platforms
and across the compiled/pure kernel backends, which implement the identical
update in C. Stream splitting is done by hashing a label together with the
parent seed, never by consuming draws from the parent stream.
"""

from __future__ import annotations

import hashlib

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 sequence; doubles are uniform in [0, 1) with 53-bit mantissa."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_uint64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        return (self.next_uint64() >> 11) * 2.0**-53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n). Derived from next_double so the compiled
        kernel reproduces it with one double multiply."""
        k = int(self.next_double() * n)
        return n - 1 if k >= n else k


def derive_seed(seed: int, *parts: object) -> int:
    """Stable 64-bit child seed from a parent seed and a label path.

    Labels are rendered to text, so (seed, "acc", "x") and (seed, "gyro", "y")
    give independent streams while staying reproducible across processes.
    """
    tag = ":".join([str(seed & _MASK64)] + [str(p) for p in parts])
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")
