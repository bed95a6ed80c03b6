"""Pinned 64-bit PRNG for reproducible simulation runs.

The engine's determinism contract requires the same seed to produce the
same coordinate sequence on every platform and library version, so the
generator algorithm is fixed here (splitmix64) rather than delegated to a
platform default. Bounded draws use rejection sampling and are exactly
uniform.
"""

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream: one 64-bit output per state increment."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN_GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        # accept only draws below the largest multiple of n
        limit = ((1 << 64) // n) * n
        while True:
            u = self.next_uint64()
            if u < limit:
                return u % n
