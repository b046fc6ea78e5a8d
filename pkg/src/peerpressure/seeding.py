"""Reproducible per-trial seeds.

A trial's generator is seeded with ``mix_seed(seed, index)``: both inputs go
through the SplitMix64 finalizer, so neighbouring trial indices give
statistically unrelated streams.  Reproducibility is promised within this
package only.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, index: int) -> int:
    """64-bit seed for trial ``index`` of an experiment seeded with ``seed``."""
    return splitmix64(splitmix64(seed & MASK64) ^ (index & MASK64))
