"""Recursive schema model: per-document discovery, merging and canonical form."""

from __future__ import annotations

import math
import random
import sys

from . import config as C
from .facets import (
    ArrayType,
    AttributeCounts,
    Dependencies,
    Examples,
    Format,
    MaxMin,
    Multiple,
    ObjectTypes,
    Pattern,
    Required,
    Unique,
)
from .hashing import hash128
from .moments import MomentsAccumulator
from .pds import BloomFilter, HyperLogLog, StreamingHistogram

MAX_DEPTH = 1000

KINDS = ("any", "array", "boolean", "null", "number", "object", "product", "string")
_KIND_RANK = {k: i for i, k in enumerate(KINDS)}

# Facets whose combine recurses into child schemas or draws random numbers.
_RNG_FACETS = frozenset({C.OBJECT_TYPES, C.ARRAY_TYPE, C.EXAMPLES})


class ConfigMismatch(ValueError):
    pass


class DepthError(ValueError):
    pass


def ensure_recursion_limit(depth: int = MAX_DEPTH) -> None:
    """Discovery and merging recurse a few frames per nesting level."""
    need = 4 * depth + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


class SchemaNode:
    """One node of a discovered schema.

    ``kind`` is a basic JSON kind, ``any`` (never observed) or ``product``.
    ``facets`` maps facet name to facet value. Products keep their
    alternatives in ``branches``, ordered by kind and (under label
    equivalence) by key set. ``integral`` is tracked for numbers only;
    ``count`` is the number of observations folded into the node.
    Nodes are treated as immutable.
    """

    __slots__ = ("kind", "cfg", "facets", "branches", "integral", "count", "labels")

    def __init__(self, kind, cfg, facets=None, branches=(), integral=None, count=0, labels=None):
        self.kind = kind
        self.cfg = cfg
        self.facets = facets if facets is not None else {}
        self.branches = tuple(branches)
        self.integral = integral
        self.count = count
        self.labels = labels

    def __eq__(self, other):
        if not isinstance(other, SchemaNode):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.count == other.count
            and self.integral == other.integral
            and self.labels == other.labels
            and self.branches == other.branches
            and self.facets == other.facets
        )

    __hash__ = None

    def __repr__(self):
        if self.kind == "product":
            return f"SchemaNode(product, {list(self.branches)!r})"
        return f"SchemaNode({self.kind}, count={self.count}, facets={sorted(self.facets)})"

    def get(self, facet: str):
        return self.facets.get(facet)

    @property
    def properties(self) -> dict:
        ot = self.facets.get(C.OBJECT_TYPES)
        return ot.types if ot is not None else {}


def any_node(cfg) -> SchemaNode:
    return SchemaNode("any", cfg)


def kind_of(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    raise TypeError(f"not a JSON value: {type(value).__name__}")


def is_integral(x) -> bool:
    return isinstance(x, int) or x.is_integer()


def normalize_number(x):
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def discover_document(doc, cfg: C.DiscoveryConfig, _depth: int = 0) -> SchemaNode:
    """Schema describing exactly one JSON value."""
    if _depth > MAX_DEPTH:
        raise DepthError(f"nesting deeper than {MAX_DEPTH}")
    kind = kind_of(doc)
    on = cfg.facets
    if kind in ("null", "boolean"):
        return SchemaNode(kind, cfg, count=1)

    facets: dict = {}
    if kind == "number":
        if isinstance(doc, float) and not math.isfinite(doc):
            raise ValueError("non-finite numbers are not JSON")
        num = normalize_number(doc)
        if C.MAXMIN_NUMBER in on:
            facets[C.MAXMIN_NUMBER] = MaxMin(num, num)
        if C.MULTIPLE in on:
            facets[C.MULTIPLE] = Multiple.of(doc)
        if C.EXAMPLES in on:
            facets[C.EXAMPLES] = Examples((doc,), 1, cfg.reservoir_capacity)
        _add_sketches(facets, doc, cfg)
        try:
            as_float = float(num)
        except OverflowError:
            as_float = None
        if as_float is not None:
            if C.HISTOGRAM in on:
                facets[C.HISTOGRAM] = StreamingHistogram(cfg.histogram_max_bins, ((num, 1),))
            if C.STATS in on:
                facets[C.STATS] = MomentsAccumulator(1, as_float, 0.0, 0.0, 0.0)
        return SchemaNode("number", cfg, facets, integral=is_integral(doc), count=1)

    if kind == "string":
        if C.MAXMIN_STRING in on:
            facets[C.MAXMIN_STRING] = MaxMin(len(doc), len(doc))
        if C.PATTERN in on:
            facets[C.PATTERN] = Pattern(doc, doc)
        if C.FORMAT in on:
            facets[C.FORMAT] = Format.of(doc)
        if C.EXAMPLES in on:
            facets[C.EXAMPLES] = Examples((doc,), 1, cfg.reservoir_capacity)
        _add_sketches(facets, doc, cfg)
        return SchemaNode("string", cfg, facets, count=1)

    if kind == "array":
        if C.ARRAY_TYPE in on:
            children = [discover_document(x, cfg, _depth + 1) for x in doc]
            facets[C.ARRAY_TYPE] = ArrayType.of(children, any_node(cfg))
        if C.MAXMIN_ARRAY in on:
            facets[C.MAXMIN_ARRAY] = MaxMin(len(doc), len(doc))
        if C.UNIQUE in on:
            facets[C.UNIQUE] = Unique.of(doc)
        return SchemaNode("array", cfg, facets, count=1)

    # object
    for key in doc:
        if not isinstance(key, str):
            raise TypeError(f"object keys must be strings, got {type(key).__name__}")
    if C.OBJECT_TYPES in on:
        facets[C.OBJECT_TYPES] = ObjectTypes({k: discover_document(v, cfg, _depth + 1) for k, v in doc.items()})
    if C.REQUIRED in on:
        facets[C.REQUIRED] = Required(frozenset(doc))
    if C.ATTRIBUTE_COUNTS in on:
        facets[C.ATTRIBUTE_COUNTS] = AttributeCounts.of(doc)
    if C.DEPENDENCIES in on:
        facets[C.DEPENDENCIES] = Dependencies.of(doc)
    labels = frozenset(doc) if cfg.equivalence == "label" else None
    return SchemaNode("object", cfg, facets, count=1, labels=labels)


def _add_sketches(facets: dict, value, cfg) -> None:
    on = cfg.facets
    if C.BLOOM not in on and C.HLL not in on:
        return
    h = hash128(value)
    if C.BLOOM in on:
        facets[C.BLOOM] = BloomFilter(cfg.bloom_bits, cfg.bloom_hashes).add_hashed(h)
    if C.HLL in on:
        facets[C.HLL] = HyperLogLog(cfg.hll_precision).add_hashed(h)


def equivalent(a: SchemaNode, b: SchemaNode) -> bool:
    """Kind equivalence, plus identical key sets for objects under label equivalence."""
    if a.kind != b.kind:
        return False
    if a.kind == "object" and a.cfg.equivalence == "label":
        return a.labels == b.labels
    return True


def _branch_key(node: SchemaNode):
    return (_KIND_RANK[node.kind], tuple(sorted(node.labels)) if node.labels is not None else ())


def _check_cfg(a: SchemaNode, b: SchemaNode) -> None:
    if a.cfg is not b.cfg and a.cfg != b.cfg:
        raise ConfigMismatch("schemas were discovered with different configurations")


def merge_schemas(a: SchemaNode, b: SchemaNode, rng: random.Random | None = None) -> SchemaNode:
    """Combine two schemas under the configured equivalence relation.

    Equivalent nodes merge facet by facet; anything else becomes (or
    extends) a product. ``any`` is the identity.
    """
    _check_cfg(a, b)
    if a.kind == "any":
        return b
    if b.kind == "any":
        return a
    if a.kind == "product" or b.kind == "product":
        branches = list(a.branches) if a.kind == "product" else [a]
        for x in b.branches if b.kind == "product" else (b,):
            branches = _insert_branch(branches, x, rng)
        return _product(branches, a.cfg)
    if equivalent(a, b):
        return _merge_same(a, b, rng)
    return _product([a, b], a.cfg)


def _insert_branch(branches: list, x: SchemaNode, rng) -> list:
    for i, br in enumerate(branches):
        if equivalent(br, x):
            out = list(branches)
            out[i] = _merge_same(br, x, rng)
            return out
    return branches + [x]


def _product(branches, cfg) -> SchemaNode:
    branches = sorted(branches, key=_branch_key)
    return SchemaNode("product", cfg, branches=branches, count=sum(b.count for b in branches))


def _merge_same(a: SchemaNode, b: SchemaNode, rng) -> SchemaNode:
    fa, fb = a.facets, b.facets
    facets = dict(fa)
    for name, g in fb.items():
        f = facets.get(name)
        if f is None:
            facets[name] = g
        elif name in _RNG_FACETS:
            facets[name] = f.combine(g, rng)
        else:
            facets[name] = f.combine(g)
    integral = None if a.integral is None else (a.integral and b.integral)
    return SchemaNode(a.kind, a.cfg, facets, integral=integral, count=a.count + b.count, labels=a.labels)


def canonicalize(node: SchemaNode) -> SchemaNode:
    """Sort property maps and product branches; idempotent."""
    from .emit import canonical_bytes

    if node.kind == "product":
        branches = [canonicalize(b) for b in node.branches]
        branches.sort(key=lambda b: (b.kind, canonical_bytes(b)))
        return SchemaNode("product", node.cfg, branches=branches, count=node.count)
    facets = dict(node.facets)
    ot = facets.get(C.OBJECT_TYPES)
    if ot is not None:
        facets[C.OBJECT_TYPES] = ObjectTypes({k: canonicalize(ot.types[k]) for k in sorted(ot.types)})
    at = facets.get(C.ARRAY_TYPE)
    if at is not None and at.mode is not None:
        if at.positions is not None:
            facets[C.ARRAY_TYPE] = ArrayType(positions=tuple(canonicalize(p) for p in at.positions))
        else:
            facets[C.ARRAY_TYPE] = ArrayType(item=canonicalize(at.item))
    return SchemaNode(
        node.kind, node.cfg, facets, integral=node.integral, count=node.count, labels=node.labels
    )


def project(node: SchemaNode, facets) -> SchemaNode:
    """Copy of ``node`` keeping only the given facets, recursively.

    Projecting a schema discovered with a large facet set gives the same
    result as discovering with the smaller set directly.
    """
    keep = frozenset(facets)
    cfg = node.cfg.with_facets(keep & node.cfg.facets)
    return _project(node, keep, cfg)


def _project(node, keep, cfg):
    if node.kind == "product":
        return SchemaNode("product", cfg, branches=[_project(b, keep, cfg) for b in node.branches], count=node.count)
    facets = {}
    for name, f in node.facets.items():
        if name not in keep:
            continue
        if name == C.OBJECT_TYPES:
            f = ObjectTypes({k: _project(v, keep, cfg) for k, v in f.types.items()})
        elif name == C.ARRAY_TYPE and f.mode is not None:
            if f.positions is not None:
                f = ArrayType(positions=tuple(_project(p, keep, cfg) for p in f.positions))
            else:
                f = ArrayType(item=_project(f.item, keep, cfg))
        facets[name] = f
    return SchemaNode(node.kind, cfg, facets, integral=node.integral, count=node.count, labels=node.labels)


def walk(node: SchemaNode, path: tuple = ()):
    """Yield ``(path, node, in_array)`` for every non-product node.

    Paths are tuples of object keys, ``"*"`` for list items and integer
    positions for tuple items; products are transparent.
    """
    stack = [(path, node, False)]
    while stack:
        p, n, in_arr = stack.pop()
        if n.kind == "product":
            stack.extend((p, b, in_arr) for b in reversed(n.branches))
            continue
        yield p, n, in_arr
        ot = n.facets.get(C.OBJECT_TYPES)
        if ot is not None:
            for k in sorted(ot.types, reverse=True):
                stack.append((p + (k,), ot.types[k], in_arr))
        at = n.facets.get(C.ARRAY_TYPE)
        if at is not None and at.mode is not None:
            if at.positions is not None:
                for i in reversed(range(len(at.positions))):
                    stack.append((p + (i,), at.positions[i], True))
            else:
                stack.append((p + ("*",), at.item, True))


def pointer(path: tuple) -> str:
    """JSON-pointer text for a schema path (``*`` marks any list index)."""
    if not path:
        return ""
    return "".join("/" + str(seg).replace("~", "~0").replace("/", "~1") for seg in path)
