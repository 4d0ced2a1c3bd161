"""Seedable random source with exact integer draws and jump-ahead streams."""

from __future__ import annotations

import secrets
from bisect import bisect_right

import numpy as np

_WORDS = 256


class Rng:
    """PCG64 stream.  ``randbelow`` is exactly uniform for any bigint bound.

    ``Rng(seed, stream=k)`` is the ``k``-th jumped-ahead substream of ``seed``;
    substreams do not overlap for any practical run length.
    """

    def __init__(self, seed: int | None = None, stream: int = 0):
        if seed is None:
            seed = secrets.randbits(64)
        self.seed = int(seed) & (2**64 - 1)
        self.stream = stream
        bitgen = np.random.PCG64(self.seed)
        if stream:
            bitgen = bitgen.jumped(stream)
        self._bitgen = bitgen
        self.generator = np.random.Generator(bitgen)
        self._buf: list[int] = []

    def spawn(self, stream: int) -> Rng:
        return Rng(self.seed, stream)

    def _word(self) -> int:
        if not self._buf:
            self._buf = self._bitgen.random_raw(_WORDS).tolist()
            self._buf.reverse()
        return self._buf.pop()

    def getrandbits(self, k: int) -> int:
        x = 0
        got = 0
        while got < k:
            x = (x << 64) | self._word()
            got += 64
        return x >> (got - k)

    def randbelow(self, m: int) -> int:
        """Uniform integer in ``[0, m)`` by rejection on raw bits (no rounding)."""
        if m <= 0:
            raise ValueError("bound must be positive")
        if m == 1:
            return 0
        k = (m - 1).bit_length()
        while True:
            x = self.getrandbits(k)
            if x < m:
                return x

    def choice_weighted(self, cumulative: list[int]) -> int:
        """Index ``i`` with probability ``(cum[i] - cum[i-1]) / cum[-1]``."""
        return bisect_right(cumulative, self.randbelow(cumulative[-1]))

    def random_bit(self) -> int:
        return self.getrandbits(1)

    def permutation(self, n: int) -> list[int]:
        """Uniform permutation of ``0..n-1`` (Fisher-Yates)."""
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    def shuffle(self, items: list):
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
