"""Discovery configuration and the named facet sets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

OBJECT_TYPES = "ObjectTypes"
ARRAY_TYPE = "ArrayType"
MAXMIN_NUMBER = "MaxMinNumber"
MAXMIN_STRING = "MaxMinStringLength"
MAXMIN_ARRAY = "MaxMinArrayLength"
MULTIPLE = "Multiple"
PATTERN = "Pattern"
FORMAT = "Format"
EXAMPLES = "Examples"
REQUIRED = "Required"
DEPENDENCIES = "Dependencies"
UNIQUE = "Unique"
ATTRIBUTE_COUNTS = "AttributeCounts"
BLOOM = "Bloom"
HLL = "HLL"
HISTOGRAM = "Histogram"
STATS = "Stats"

MIN_FACETS = frozenset({OBJECT_TYPES, ARRAY_TYPE})
SIMPLE_FACETS = MIN_FACETS | {
    MAXMIN_NUMBER,
    MAXMIN_STRING,
    MAXMIN_ARRAY,
    MULTIPLE,
    PATTERN,
    FORMAT,
    EXAMPLES,
    REQUIRED,
    DEPENDENCIES,
    UNIQUE,
}
ALL_FACETS = SIMPLE_FACETS | {ATTRIBUTE_COUNTS, BLOOM, HLL, HISTOGRAM, STATS}

FACET_SETS = {"min": MIN_FACETS, "simple": SIMPLE_FACETS, "all": ALL_FACETS}

# Shorthands accepted in explicit facet lists.
ALIASES = {"MaxMin": (MAXMIN_NUMBER, MAXMIN_STRING, MAXMIN_ARRAY), "Mean": (STATS,)}

# Which facets may appear on which node kind.
KIND_FACETS = {
    "object": frozenset({OBJECT_TYPES, REQUIRED, ATTRIBUTE_COUNTS, DEPENDENCIES}),
    "array": frozenset({ARRAY_TYPE, MAXMIN_ARRAY, UNIQUE}),
    "string": frozenset({MAXMIN_STRING, PATTERN, FORMAT, EXAMPLES, BLOOM, HLL}),
    "number": frozenset({MAXMIN_NUMBER, MULTIPLE, EXAMPLES, BLOOM, HLL, HISTOGRAM, STATS}),
    "boolean": frozenset(),
    "null": frozenset(),
    "any": frozenset(),
    "product": frozenset(),
}

EQUIVALENCES = ("kind", "label")


def parse_facets(facets: str | set | frozenset | list | tuple) -> frozenset:
    """Resolve ``min``/``simple``/``all`` or an explicit facet list.

    Lists may be given as a comma-separated string.
    """
    if isinstance(facets, str):
        name = facets.strip().lower()
        if name in FACET_SETS:
            return FACET_SETS[name]
        items = [s.strip() for s in facets.split(",") if s.strip()]
    else:
        items = list(facets)
    out = set()
    for item in items:
        if item in ALIASES:
            out.update(ALIASES[item])
        elif item in ALL_FACETS:
            out.add(item)
        else:
            raise ValueError(f"unknown facet {item!r}")
    return frozenset(out)


def facet_set_name(facets: frozenset) -> str:
    for name, members in FACET_SETS.items():
        if facets == members:
            return name
    return ",".join(sorted(facets))


@dataclass(frozen=True)
class DiscoveryConfig:
    facets: frozenset = field(default=ALL_FACETS)
    equivalence: str = "kind"
    reservoir_capacity: int = 100
    histogram_max_bins: int = 100
    bloom_bits: int = 65536
    bloom_hashes: int = 7
    hll_precision: int = 12
    pattern_min_length: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if not isinstance(self.facets, frozenset):
            object.__setattr__(self, "facets", parse_facets(self.facets))
        unknown = self.facets - ALL_FACETS
        if unknown:
            raise ValueError(f"unknown facets: {sorted(unknown)}")
        if self.equivalence not in EQUIVALENCES:
            raise ValueError(f"equivalence must be one of {EQUIVALENCES}, got {self.equivalence!r}")
        if self.reservoir_capacity < 1:
            raise ValueError("reservoir_capacity must be >= 1")
        if self.histogram_max_bins < 1:
            raise ValueError("histogram_max_bins must be >= 1")
        if self.bloom_bits < 8 or self.bloom_bits % 8:
            raise ValueError("bloom_bits must be a positive multiple of 8")
        if self.bloom_hashes < 1:
            raise ValueError("bloom_hashes must be >= 1")
        if not 4 <= self.hll_precision <= 18:
            raise ValueError("hll_precision must be in 4..18")
        if self.pattern_min_length < 1:
            raise ValueError("pattern_min_length must be >= 1")
        object.__setattr__(self, "rng_seed", int(self.rng_seed) & 0xFFFFFFFFFFFFFFFF)

    @classmethod
    def from_monoids(cls, monoids="all", **kwargs) -> DiscoveryConfig:
        return cls(facets=parse_facets(monoids), **kwargs)

    def enabled(self, facet: str) -> bool:
        return facet in self.facets

    def with_facets(self, facets) -> DiscoveryConfig:
        return replace(self, facets=parse_facets(facets) if not isinstance(facets, frozenset) else facets)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["facets"] = sorted(self.facets)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> DiscoveryConfig:
        d = dict(d)
        d["facets"] = frozenset(d.get("facets", ()))
        return cls(**d)
