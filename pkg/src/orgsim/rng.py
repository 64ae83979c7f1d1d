"""Seeded multi-stream random number generation.

Every stream is fully determined by a (seed, stream_id) pair, so any
component of a simulation can own an independent stream and reruns are
byte-identical. The generator is SplitMix64 (Steele, Lea & Flood 2014):
64-bit integer state advanced by a fixed odd constant, output finalised
with two xor-multiply rounds. It is implemented here in plain integer
arithmetic rather than delegating to ``random.Random`` so the sequences
are pinned to this module, not to the Python version.

Streams with distinct ids under the same seed are decorrelated by hashing
(seed, stream_id) into the initial state with the same finaliser.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_DOUBLE_SCALE = 1.0 / (1 << 53)


def _mix(z: int) -> int:
    """SplitMix64 output finaliser (also used to hash stream seeds)."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """One independent random stream identified by (seed, stream_id)."""

    __slots__ = ("seed", "stream_id", "_state")

    def __init__(self, seed: int, stream_id: int = 0):
        if stream_id < 0:
            raise ValueError("stream_id must be non-negative")
        self.seed = seed & _MASK64
        self.stream_id = stream_id
        # Decorrelate streams: fold the stream id into the seed through the
        # finaliser before the first advance.
        self._state = _mix(self.seed ^ _mix((stream_id + 1) * _GAMMA & _MASK64))

    def _next(self) -> int:
        """Advance and return the next raw 64-bit word."""
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix(self._state)

    def next_uniform(self) -> float:
        """Next float in [0, 1), from the top 53 bits of one word."""
        return (self._next() >> 11) * _DOUBLE_SCALE

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n). Rejection-samples the raw word."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            r = self._next()
            if r < limit:
                return r % n

    def randint(self, a: int, b: int) -> int:
        """Integer in [a, b], both ends inclusive."""
        if b < a:
            raise ValueError("empty range")
        return a + self.randbelow(b - a + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def sample(self, population, k: int) -> list:
        """k distinct elements, drawn without replacement."""
        if k > len(population):
            raise ValueError("sample larger than population")
        pool = list(population)
        out = []
        for _ in range(k):
            out.append(pool.pop(self.randbelow(len(pool))))
        return out

    def poisson(self, lam: float) -> int:
        """Poisson draw via Knuth's product-of-uniforms method."""
        if lam < 0:
            raise ValueError("lam must be non-negative")
        if lam == 0:
            return 0
        threshold = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= self.next_uniform()
            if p <= threshold:
                return k
            k += 1

    def getstate(self) -> int:
        return self._state

    def setstate(self, state: int) -> None:
        self._state = state & _MASK64


class RngStreams:
    """Lazy collection of streams sharing one base seed."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._streams: dict[int, RngStream] = {}

    def stream(self, stream_id: int) -> RngStream:
        s = self._streams.get(stream_id)
        if s is None:
            s = RngStream(self.seed, stream_id)
            self._streams[stream_id] = s
        return s

    def state_dict(self) -> dict[str, int]:
        """Current state of every instantiated stream, for fingerprinting."""
        return {str(k): v.getstate() for k, v in sorted(self._streams.items())}
