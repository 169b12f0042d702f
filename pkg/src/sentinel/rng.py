"""Portable seeded random number generation.

All randomness in the simulator and detection pipeline flows through the
xoshiro256** generator below so that runs are reproducible bit-for-bit and
other implementations can match streams from the published constants alone.
Substreams (one per actor, per subsystem, ...) are derived by hashing a
canonical tag string with SHA-256, which is equally portable.
"""

from __future__ import annotations

import hashlib
import math

MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """One step of splitmix64; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, (z ^ (z >> 31)) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** 1.0 (Blackman & Vigna's public-domain constants)."""

    def __init__(self, seed: int):
        s = seed & MASK64
        state = []
        for _ in range(4):
            s, out = splitmix64(s)
            state.append(out)
        if not any(state):  # all-zero state is invalid
            state[0] = 1
        self._s = state

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        # rejection sampling to avoid modulo bias
        limit = (MASK64 + 1) - ((MASK64 + 1) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + (x % span)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randint(0, i)
            seq[i], seq[j] = seq[j], seq[i]

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller without state caching (one uniform pair per draw)."""
        u1 = self.random()
        while u1 <= 1e-300:
            u1 = self.random()
        u2 = self.random()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mu + sigma * z

    def poisson(self, lam: float) -> int:
        """Poisson draw via product-of-uniforms (fine for the small rates here)."""
        if lam < 0:
            raise ValueError("rate must be >= 0")
        if lam == 0:
            return 0
        threshold = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= self.random()
            if p <= threshold:
                return k
            k += 1


def substream(seed: int, *tags) -> Xoshiro256StarStar:
    """Derive an independent generator from a seed and a tag tuple.

    The tag tuple is rendered canonically and hashed with SHA-256; the first
    8 bytes (big-endian) seed the xoshiro state through splitmix64.
    """
    canon = repr((int(seed),) + tuple(str(t) for t in tags)).encode("utf-8")
    digest = hashlib.sha256(canon).digest()
    return Xoshiro256StarStar(int.from_bytes(digest[:8], "big"))
