"""Mergeable probabilistic sketches: Bloom filter, HyperLogLog, streaming histogram.

All three are immutable values. ``add`` and ``combine`` return new
instances, so a sketch can be shared between threads or stored inside a
schema node without copying.
"""

from __future__ import annotations

import base64
import bisect
import math
import struct

import numpy as np

from .hashing import _MASK64, hash128


class SketchMismatch(ValueError):
    """Raised when combining sketches built with different parameters."""


def pack_bytes(payload: bytes) -> str:
    """Length-prefixed (u32 little-endian) payload, base64 encoded."""
    return base64.b64encode(struct.pack("<I", len(payload)) + payload).decode("ascii")


def unpack_bytes(text: str) -> bytes:
    raw = base64.b64decode(text)
    (n,) = struct.unpack_from("<I", raw)
    payload = raw[4:]
    if len(payload) != n:
        raise ValueError(f"corrupt sketch payload: expected {n} bytes, got {len(payload)}")
    return payload


class BloomFilter:
    """Bit-array Bloom filter over canonical value bytes.

    Positions come from double hashing, ``(h1 + i*h2) mod m``. The bit
    array is held as a Python int, which makes OR/AND and equality cheap.
    """

    __slots__ = ("m", "k", "bits")

    def __init__(self, m: int = 65536, k: int = 7, bits: int = 0):
        self.m = m
        self.k = k
        self.bits = bits

    def positions(self, hashes: tuple[int, int]) -> list[int]:
        h1, h2 = hashes
        m = self.m
        return [((h1 + i * h2) & _MASK64) % m for i in range(self.k)]

    def add_hashed(self, hashes: tuple[int, int]) -> BloomFilter:
        mask = 0
        for pos in self.positions(hashes):
            mask |= 1 << pos
        return BloomFilter(self.m, self.k, self.bits | mask)

    def add(self, value) -> BloomFilter:
        return self.add_hashed(hash128(value))

    def __contains__(self, value) -> bool:
        bits = self.bits
        return all(bits >> pos & 1 for pos in self.positions(hash128(value)))

    query = __contains__

    def _check(self, other: BloomFilter) -> None:
        if self.m != other.m or self.k != other.k:
            raise SketchMismatch(f"bloom parameters differ: ({self.m},{self.k}) vs ({other.m},{other.k})")

    def combine(self, other: BloomFilter) -> BloomFilter:
        self._check(other)
        if self.bits == other.bits:
            return self
        return BloomFilter(self.m, self.k, self.bits | other.bits)

    def issubset(self, other: BloomFilter) -> bool:
        """True when every bit set here is also set in ``other``."""
        self._check(other)
        return self.bits & other.bits == self.bits

    def fill_ratio(self) -> float:
        return self.bits.bit_count() / self.m

    def __eq__(self, other):
        if not isinstance(other, BloomFilter):
            return NotImplemented
        return (self.m, self.k, self.bits) == (other.m, other.k, other.bits)

    def __hash__(self):
        return hash((self.m, self.k, self.bits))

    def __repr__(self):
        return f"BloomFilter(m={self.m}, k={self.k}, fill={self.fill_ratio():.4f})"

    def to_state(self) -> dict:
        return {"m": self.m, "k": self.k, "bits": pack_bytes(self.bits.to_bytes(self.m // 8, "little"))}

    @classmethod
    def from_state(cls, d: dict) -> BloomFilter:
        return cls(d["m"], d["k"], int.from_bytes(unpack_bytes(d["bits"]), "little"))


def bloom_false_positive_rate(m: int, k: int, n: int) -> float:
    """Analytic approximation ``(1 - e^{-kn/m})^k``."""
    return (1.0 - math.exp(-k * n / m)) ** k


def _alpha(m: int) -> float:
    if m == 16:
        return 0.673
    if m == 32:
        return 0.697
    if m == 64:
        return 0.709
    return 0.7213 / (1.0 + 1.079 / m)


class HyperLogLog:
    """HyperLogLog with 2**p one-byte registers.

    The register index is the top ``p`` bits of the first 64-bit hash half;
    the rank is the position of the leading one bit in the remaining
    ``64 - p`` bits.
    """

    __slots__ = ("p", "registers")

    def __init__(self, p: int = 12, registers: bytes | None = None):
        self.p = p
        self.registers = bytes(1 << p) if registers is None else registers

    @property
    def m(self) -> int:
        return 1 << self.p

    def _slot(self, hashes: tuple[int, int]) -> tuple[int, int]:
        h = hashes[0]
        width = 64 - self.p
        idx = h >> width
        rest = h & ((1 << width) - 1)
        rank = width - rest.bit_length() + 1
        return idx, rank

    def add_hashed(self, hashes: tuple[int, int]) -> HyperLogLog:
        idx, rank = self._slot(hashes)
        if self.registers[idx] >= rank:
            return self
        regs = bytearray(self.registers)
        regs[idx] = rank
        return HyperLogLog(self.p, bytes(regs))

    def add(self, value) -> HyperLogLog:
        return self.add_hashed(hash128(value))

    def combine(self, other: HyperLogLog) -> HyperLogLog:
        if self.p != other.p:
            raise SketchMismatch(f"hll precision differs: {self.p} vs {other.p}")
        if self.registers == other.registers:
            return self
        merged = np.maximum(
            np.frombuffer(self.registers, dtype=np.uint8),
            np.frombuffer(other.registers, dtype=np.uint8),
        )
        return HyperLogLog(self.p, merged.tobytes())

    def estimate(self) -> float:
        m = self.m
        regs = np.frombuffer(self.registers, dtype=np.uint8)
        zeros = int(np.count_nonzero(regs == 0))
        if zeros == m:
            return 0.0
        raw = _alpha(m) * m * m / float(np.sum(np.ldexp(1.0, -regs.astype(np.int64))))
        if raw <= 2.5 * m and zeros:
            return m * math.log(m / zeros)
        two64 = 2.0**64
        if raw > two64 / 30.0:
            return -two64 * math.log(1.0 - raw / two64)
        return raw

    def standard_error(self) -> float:
        return 1.04 / math.sqrt(self.m)

    def __eq__(self, other):
        if not isinstance(other, HyperLogLog):
            return NotImplemented
        return self.p == other.p and self.registers == other.registers

    def __hash__(self):
        return hash((self.p, self.registers))

    def __repr__(self):
        return f"HyperLogLog(p={self.p}, estimate={self.estimate():.1f})"

    def to_state(self) -> dict:
        return {"p": self.p, "registers": pack_bytes(self.registers)}

    @classmethod
    def from_state(cls, d: dict) -> HyperLogLog:
        regs = unpack_bytes(d["registers"])
        if len(regs) != 1 << d["p"]:
            raise ValueError("register array length does not match precision")
        return cls(d["p"], regs)


class StreamingHistogram:
    """Ben-Haim/Tom-Tov streaming histogram.

    ``bins`` is a tuple of ``(value, count)`` pairs with strictly
    increasing values. Whenever there are more than ``max_bins`` bins, the
    two adjacent bins with the smallest value gap are replaced by their
    count-weighted mean.
    """

    __slots__ = ("max_bins", "bins")

    def __init__(self, max_bins: int = 100, bins=()):
        self.max_bins = max_bins
        self.bins = tuple(bins)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.bins)

    def add(self, value) -> StreamingHistogram:
        bins = list(self.bins)
        i = bisect.bisect_left(bins, (value,))
        if i < len(bins) and bins[i][0] == value:
            bins[i] = (bins[i][0], bins[i][1] + 1)
            return StreamingHistogram(self.max_bins, bins)
        bins.insert(i, (value, 1))
        return StreamingHistogram(self.max_bins, _shrink(bins, self.max_bins))

    def combine(self, other: StreamingHistogram) -> StreamingHistogram:
        if self.max_bins != other.max_bins:
            raise SketchMismatch(f"histogram sizes differ: {self.max_bins} vs {other.max_bins}")
        if not other.bins:
            return self
        if not self.bins:
            return other
        if len(other.bins) == 1 and other.bins[0][1] == 1:
            return self.add(other.bins[0][0])
        if len(self.bins) == 1 and self.bins[0][1] == 1:
            return other.add(self.bins[0][0])
        merged: list = []
        for v, c in sorted(self.bins + other.bins):
            if merged and merged[-1][0] == v:
                merged[-1] = (v, merged[-1][1] + c)
            else:
                merged.append((v, c))
        return StreamingHistogram(self.max_bins, _shrink(merged, self.max_bins))

    def quantile(self, q: float) -> float:
        """Interpolated quantile, treating each bin as mass centred on its value."""
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must be in [0, 1]")
        if not self.bins:
            raise ValueError("quantile of an empty histogram")
        total = self.total
        target = q * total
        centres = []
        acc = 0.0
        for v, c in self.bins:
            centres.append(acc + c / 2.0)
            acc += c
        if target <= centres[0]:
            return float(self.bins[0][0])
        if target >= centres[-1]:
            return float(self.bins[-1][0])
        j = bisect.bisect_right(centres, target)
        lo, hi = centres[j - 1], centres[j]
        v0, v1 = self.bins[j - 1][0], self.bins[j][0]
        return v0 + (v1 - v0) * (target - lo) / (hi - lo)

    def cdf(self, x: float) -> float:
        """Step CDF with all bin mass placed at the bin value."""
        total = self.total
        if not total:
            raise ValueError("cdf of an empty histogram")
        return sum(c for v, c in self.bins if v <= x) / total

    def __eq__(self, other):
        if not isinstance(other, StreamingHistogram):
            return NotImplemented
        return self.max_bins == other.max_bins and self.bins == other.bins

    def __hash__(self):
        return hash((self.max_bins, self.bins))

    def __repr__(self):
        return f"StreamingHistogram(bins={len(self.bins)}, total={self.total})"

    def to_state(self) -> dict:
        return {"max_bins": self.max_bins, "bins": [[v, c] for v, c in self.bins]}

    @classmethod
    def from_state(cls, d: dict) -> StreamingHistogram:
        return cls(d["max_bins"], [(v, c) for v, c in d["bins"]])


def _shrink(bins: list, max_bins: int) -> list:
    while len(bins) > max_bins:
        best = 0
        best_gap = bins[1][0] - bins[0][0]
        for i in range(1, len(bins) - 1):
            gap = bins[i + 1][0] - bins[i][0]
            if gap < best_gap:
                best, best_gap = i, gap
        (v0, c0), (v1, c1) = bins[best], bins[best + 1]
        c = c0 + c1
        bins[best : best + 2] = [((v0 * c0 + v1 * c1) / c, c)]
    return bins
