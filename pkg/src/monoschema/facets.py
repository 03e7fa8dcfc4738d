"""Facet monoids attached to schema nodes.

Each facet has an identity (``identity()``), a constructor from one
observation, and a ``combine`` that is commutative and associative.
Facets are immutable; ``combine`` always returns a new value (or one of
its inputs when nothing changes).

The sketch facets (Bloom, HLL, Histogram, Stats) reuse the classes in
:mod:`monoschema.pds` and :mod:`monoschema.moments` directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import gcd

from .hashing import canonical_json

# --- structural ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ObjectTypes:
    types: dict

    @classmethod
    def identity(cls) -> ObjectTypes:
        return cls({})

    def combine(self, other: ObjectTypes, rng=None) -> ObjectTypes:
        from .schema import merge_schemas

        if not other.types:
            return self
        if not self.types:
            return other
        out = dict(self.types)
        for key, node in other.types.items():
            mine = out.get(key)
            out[key] = node if mine is None else merge_schemas(mine, node, rng)
        return ObjectTypes(out)


@dataclass(frozen=True, slots=True)
class ArrayType:
    """Item schemas of an array node.

    ``positions`` is set in tuple mode (every array seen so far had that
    exact length); ``item`` is set in list mode. Both None is the identity.
    """

    positions: tuple | None = None
    item: object = None

    @classmethod
    def identity(cls) -> ArrayType:
        return cls()

    @property
    def mode(self) -> str | None:
        if self.positions is not None:
            return "tuple"
        if self.item is not None:
            return "list"
        return None

    @classmethod
    def of(cls, children, any_node) -> ArrayType:
        if not children:
            return cls(item=any_node)
        return cls(positions=tuple(children))

    def combine(self, other: ArrayType, rng=None) -> ArrayType:
        from .schema import merge_schemas

        if other.mode is None:
            return self
        if self.mode is None:
            return other
        if self.positions is not None and other.positions is not None:
            if len(self.positions) == len(other.positions):
                return ArrayType(
                    positions=tuple(merge_schemas(x, y, rng) for x, y in zip(self.positions, other.positions))
                )
        parts = []
        for side in (self, other):
            if side.positions is not None:
                parts.extend(side.positions)
            else:
                parts.append(side.item)
        item = parts[0]
        for node in parts[1:]:
            item = merge_schemas(item, node, rng)
        return ArrayType(item=item)


@dataclass(frozen=True, slots=True)
class Required:
    """Keys present in every observed object; ``None`` is the all-keys identity."""

    keys: frozenset | None = None

    @classmethod
    def identity(cls) -> Required:
        return cls(None)

    def combine(self, other: Required, rng=None) -> Required:
        if other.keys is None:
            return self
        if self.keys is None:
            return other
        return Required(self.keys & other.keys)


@dataclass(frozen=True, slots=True)
class AttributeCounts:
    counts: dict
    total: int = 0

    @classmethod
    def identity(cls) -> AttributeCounts:
        return cls({}, 0)

    @classmethod
    def of(cls, keys) -> AttributeCounts:
        return cls({k: 1 for k in keys}, 1)

    def combine(self, other: AttributeCounts, rng=None) -> AttributeCounts:
        if not other.total:
            return self
        if not self.total:
            return other
        return AttributeCounts(_sum_counts(self.counts, other.counts), self.total + other.total)

    def frequency(self, key) -> float:
        return self.counts.get(key, 0) / self.total if self.total else 0.0


@dataclass(frozen=True, slots=True)
class Dependencies:
    """Co-occurrence counts; ``pairs`` is keyed by sorted key pairs."""

    counts: dict
    pairs: dict

    @classmethod
    def identity(cls) -> Dependencies:
        return cls({}, {})

    @classmethod
    def of(cls, keys) -> Dependencies:
        ks = sorted(keys)
        return cls({k: 1 for k in ks}, {p: 1 for p in combinations(ks, 2)})

    def combine(self, other: Dependencies, rng=None) -> Dependencies:
        if not other.counts:
            return self
        if not self.counts:
            return other
        return Dependencies(_sum_counts(self.counts, other.counts), _sum_counts(self.pairs, other.pairs))

    def pair_count(self, a, b) -> int:
        return self.pairs.get((a, b) if a < b else (b, a), 0)

    def holds(self, a, b) -> bool:
        """Whenever ``a`` occurred, ``b`` occurred too."""
        n = self.counts.get(a, 0)
        return a != b and n > 0 and self.pair_count(a, b) == n

    def dependents(self) -> dict:
        """Map each key to the sorted keys that always accompany it."""
        out: dict = {}
        for (a, b), n in self.pairs.items():
            if n == self.counts[a]:
                out.setdefault(a, []).append(b)
            if n == self.counts[b]:
                out.setdefault(b, []).append(a)
        return {k: sorted(v) for k, v in out.items()}


@dataclass(frozen=True, slots=True)
class Unique:
    is_unique: bool = True

    @classmethod
    def identity(cls) -> Unique:
        return cls(True)

    @classmethod
    def of(cls, arr) -> Unique:
        return cls(len({canonical_json(x) for x in arr}) == len(arr))

    def combine(self, other: Unique, rng=None) -> Unique:
        if self.is_unique and other.is_unique:
            return self
        return self if not self.is_unique else other


def _sum_counts(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


# --- value restrictions -------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MaxMin:
    """Observed bounds; for strings and arrays the bounds are lengths."""

    min: object = None
    max: object = None

    @classmethod
    def identity(cls) -> MaxMin:
        return cls()

    @classmethod
    def of(cls, x) -> MaxMin:
        return cls(x, x)

    def combine(self, other: MaxMin, rng=None) -> MaxMin:
        if other.min is None:
            return self
        if self.min is None:
            return other
        lo = self.min if self.min <= other.min else other.min
        hi = self.max if self.max >= other.max else other.max
        if lo is self.min and hi is self.max:
            return self
        return MaxMin(lo, hi)


@dataclass(frozen=True, slots=True)
class Multiple:
    """Running gcd of integral values; 0 is the identity.

    A non-integral observation disables the facet for good.
    """

    gcd: int = 0
    disabled: bool = False

    @classmethod
    def identity(cls) -> Multiple:
        return cls()

    @classmethod
    def of(cls, x) -> Multiple:
        if isinstance(x, float):
            if not x.is_integer():
                return cls(0, True)
            x = int(x)
        return cls(abs(x), False)

    def combine(self, other: Multiple, rng=None) -> Multiple:
        if self.disabled or other.disabled:
            return Multiple(0, True)
        return Multiple(gcd(self.gcd, other.gcd), False)

    @property
    def multiple_of(self) -> int | None:
        if not self.disabled and self.gcd > 1:
            return self.gcd
        return None


def common_prefix(a: str, b: str) -> str:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return a[:i]


def common_suffix(a: str, b: str) -> str:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[-1 - i] == b[-1 - i]:
        i += 1
    return a[len(a) - i :]


@dataclass(frozen=True, slots=True)
class Pattern:
    prefix: str | None = None
    suffix: str | None = None

    @classmethod
    def identity(cls) -> Pattern:
        return cls()

    @classmethod
    def of(cls, s: str) -> Pattern:
        return cls(s, s)

    def combine(self, other: Pattern, rng=None) -> Pattern:
        if other.prefix is None:
            return self
        if self.prefix is None:
            return other
        if self.prefix == other.prefix and self.suffix == other.suffix:
            return self
        return Pattern(common_prefix(self.prefix, other.prefix), common_suffix(self.suffix, other.suffix))


_REGEX_META = frozenset(".^$*+?()[]{}|\\")


def regex_escape(s: str) -> str:
    """Escape only regex metacharacters so the result is valid in ECMA-262 and Python."""
    return "".join("\\" + c if c in _REGEX_META else c for c in s)


def pattern_regex(p: Pattern, min_length: int) -> str | None:
    if p.prefix is None:
        return None
    pre = p.prefix if len(p.prefix) >= min_length else ""
    suf = p.suffix if len(p.suffix) >= min_length else ""
    if pre and suf:
        # Lookahead keeps the regex correct when prefix and suffix overlap.
        return f"^(?={regex_escape(pre)})[\\s\\S]*{regex_escape(suf)}$"
    if pre:
        return "^" + regex_escape(pre)
    if suf:
        return regex_escape(suf) + "$"
    return None


NO_FORMAT = "none"
FORMAT_CONFLICT = "conflict"


@dataclass(frozen=True, slots=True)
class Format:
    """Detected string format.

    ``None`` is the identity, ``"none"`` means a value matched no detector,
    ``"conflict"`` means two different outcomes were merged.
    """

    format: str | None = None

    @classmethod
    def identity(cls) -> Format:
        return cls()

    @classmethod
    def of(cls, s: str) -> Format:
        from .formats import detect_format

        return cls(detect_format(s) or NO_FORMAT)

    def combine(self, other: Format, rng=None) -> Format:
        if other.format is None or other.format == self.format:
            return self
        if self.format is None:
            return other
        return Format(FORMAT_CONFLICT)

    @property
    def emitted(self) -> str | None:
        if self.format in (None, NO_FORMAT, FORMAT_CONFLICT):
            return None
        return self.format


# --- sampling -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Examples:
    """Reservoir of example values plus the number of values observed."""

    values: tuple = ()
    total: int = 0
    capacity: int = 100

    @classmethod
    def identity(cls, capacity: int = 100) -> Examples:
        return cls((), 0, capacity)

    @classmethod
    def of(cls, value, capacity: int = 100) -> Examples:
        return cls((value,), 1, capacity)

    def combine(self, other: Examples, rng: random.Random | None = None) -> Examples:
        if not other.total:
            return self
        if not self.total:
            return other
        total = self.total + other.total
        cap = min(self.capacity, other.capacity)
        if len(self.values) + len(other.values) <= cap:
            return Examples(self.values + other.values, total, cap)
        if rng is None:
            rng = random.Random(self.total * 0x9E3779B97F4A7C15 ^ other.total)
        if len(self.values) == 1 or len(other.values) == 1:
            # Closed form of the slot-by-slot draw below when one side holds a
            # single value: it is dropped only if all ``cap`` draws pick the full side.
            big, one = (self, other) if len(other.values) == 1 else (other, self)
            if rng.random() < (big.total / total) ** cap:
                return Examples(big.values, total, cap)
            values = list(big.values)
            values[rng.randrange(cap)] = one.values[0]
            return Examples(tuple(values), total, cap)
        left = list(self.values)
        right = list(other.values)
        rng.shuffle(left)
        rng.shuffle(right)
        p_left = self.total / total
        picked = []
        while len(picked) < cap and (left or right):
            if left and (not right or rng.random() < p_left):
                picked.append(left.pop())
            else:
                picked.append(right.pop())
        return Examples(tuple(picked), total, cap)
