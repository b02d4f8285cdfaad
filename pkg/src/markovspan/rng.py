"""Counter-based 64-bit random number generator for reproducible sampling.

The generator is SplitMix64: state advances by the 64-bit golden-ratio
increment 0x9E3779B97F4A7C15 and each output is the finalizer

    z  = state
    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

All arithmetic is modulo 2**64, so sequences are identical on every
platform.  Independent streams are derived by finalizing a mix of the
user seed and a stream index, which keeps trajectory i's draws fixed no
matter how trajectories are scheduled across workers.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z):
    """SplitMix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream."""

    def __init__(self, seed):
        self.state = seed & MASK64

    def next_uint64(self):
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_float(self):
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_uint64() >> 11) * (1.0 / (1 << 53))


def stream(seed, index):
    """Deterministic per-index substream of a master seed."""
    return SplitMix64(mix64((seed & MASK64) ^ ((index + 1) * GOLDEN)))
