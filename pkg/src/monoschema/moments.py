"""Mergeable central-moment accumulator (count, mean, M2, M3, M4)."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class MomentsAccumulator:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @classmethod
    def of(cls, value) -> MomentsAccumulator:
        x = float(value)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {value!r}")
        return cls(1, x, 0.0, 0.0, 0.0)

    def add(self, value) -> MomentsAccumulator:
        return self.combine(MomentsAccumulator.of(value))

    def combine(self, other: MomentsAccumulator) -> MomentsAccumulator:
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        # Fixed operand order makes the floating-point result symmetric.
        a, b = sorted((self, other), key=_order)
        na, nb = a.n, b.n
        n = na + nb
        delta = b.mean - a.mean
        dn = delta / n
        dn2 = dn * dn
        mean = a.mean + nb * dn
        m2 = a.m2 + b.m2 + delta * dn * na * nb
        m3 = a.m3 + b.m3 + delta * dn2 * na * nb * (na - nb) + 3.0 * dn * (na * b.m2 - nb * a.m2)
        m4 = (
            a.m4
            + b.m4
            + delta * dn2 * dn * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * dn2 * (na * na * b.m2 + nb * nb * a.m2)
            + 4.0 * dn * (na * b.m3 - nb * a.m3)
        )
        return MomentsAccumulator(n, mean, max(m2, 0.0), m3, max(m4, 0.0))

    @property
    def variance(self) -> float | None:
        """Population variance, ``M2 / n``."""
        return self.m2 / self.n if self.n else None

    def report(self) -> dict:
        """mean, stddev, skewness and excess kurtosis; undefined ones are omitted."""
        out: dict = {"n": self.n}
        if self.n >= 1:
            out["mean"] = self.mean
        if self.n >= 2:
            out["stddev"] = math.sqrt(self.m2 / self.n)
        if self.n >= 2 and self.m2 > 0:
            out["skewness"] = math.sqrt(self.n) * self.m3 / self.m2**1.5
            out["kurtosis"] = self.n * self.m4 / (self.m2 * self.m2) - 3.0
        return out

    def to_state(self) -> list:
        return [self.n, self.mean, self.m2, self.m3, self.m4]

    @classmethod
    def from_state(cls, s) -> MomentsAccumulator:
        return cls(int(s[0]), *(float(x) for x in s[1:]))


def _order(acc: MomentsAccumulator):
    return (acc.n, acc.mean, acc.m2, acc.m3, acc.m4)
