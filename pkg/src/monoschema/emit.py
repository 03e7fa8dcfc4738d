"""Serialize schema nodes as JSON Schema Draft 2019-09.

Standard keywords carry everything a validator needs. Collection-level
information goes under ``x-jsonoid-*`` annotation keys, which never affect
validation.
"""

from __future__ import annotations

import json

from . import config as C
from .facets import pattern_regex
from .schema import SchemaNode

SCHEMA_URI = "https://json-schema.org/draft/2019-09/schema"
ANNOTATION_PREFIX = "x-jsonoid-"

# Annotations whose values depend on fold order or random draws.
NONDETERMINISTIC_ANNOTATIONS = frozenset(
    {ANNOTATION_PREFIX + "examples", ANNOTATION_PREFIX + "histogram", ANNOTATION_PREFIX + "stats"}
)


def emit_json_schema(node: SchemaNode, *, closed: bool = True, include_sketches: bool = False) -> dict:
    """Draft 2019-09 schema document for ``node``.

    ``closed`` controls ``additionalProperties: false`` on objects.
    ``include_sketches`` embeds raw Bloom/HLL payloads as annotations.
    """
    out = {"$schema": SCHEMA_URI}
    out.update(_fragment(node, closed, include_sketches))
    return out


def _fragment(node: SchemaNode, closed: bool, sketches: bool) -> dict:
    kind = node.kind
    if kind == "any":
        return {}
    if kind == "product":
        # Open objects with different key sets can overlap, so oneOf would reject them.
        key = "anyOf" if not closed and node.cfg.equivalence == "label" else "oneOf"
        return {key: [_fragment(b, closed, sketches) for b in node.branches]}
    if kind in ("null", "boolean"):
        return {"type": kind}
    f = node.facets
    cfg = node.cfg
    out: dict = {}

    if kind == "number":
        out["type"] = "integer" if node.integral else "number"
        mm = f.get(C.MAXMIN_NUMBER)
        if mm is not None and mm.min is not None:
            out["minimum"] = mm.min
            out["maximum"] = mm.max
        mult = f.get(C.MULTIPLE)
        if mult is not None and mult.multiple_of is not None:
            out["multipleOf"] = mult.multiple_of
        hist = f.get(C.HISTOGRAM)
        if hist is not None and hist.bins:
            out[ANNOTATION_PREFIX + "histogram"] = [[v, c] for v, c in hist.bins]
        stats = f.get(C.STATS)
        if stats is not None and stats.n:
            out[ANNOTATION_PREFIX + "stats"] = stats.report()

    elif kind == "string":
        out["type"] = "string"
        mm = f.get(C.MAXMIN_STRING)
        if mm is not None and mm.min is not None:
            out["minLength"] = mm.min
            out["maxLength"] = mm.max
        pat = f.get(C.PATTERN)
        if pat is not None:
            regex = pattern_regex(pat, cfg.pattern_min_length)
            if regex is not None:
                out["pattern"] = regex
        fmt = f.get(C.FORMAT)
        if fmt is not None and fmt.emitted is not None:
            out["format"] = fmt.emitted

    elif kind == "array":
        out["type"] = "array"
        at = f.get(C.ARRAY_TYPE)
        if at is not None and at.mode is not None:
            if at.positions is not None:
                out["items"] = [_fragment(p, closed, sketches) for p in at.positions]
                out["additionalItems"] = False
            else:
                out["items"] = _fragment(at.item, closed, sketches)
        mm = f.get(C.MAXMIN_ARRAY)
        if mm is not None and mm.min is not None:
            out["minItems"] = mm.min
            out["maxItems"] = mm.max
        uniq = f.get(C.UNIQUE)
        if uniq is not None and uniq.is_unique:
            out["uniqueItems"] = True

    else:  # object
        out["type"] = "object"
        ot = f.get(C.OBJECT_TYPES)
        if ot is not None:
            out["properties"] = {k: _fragment(ot.types[k], closed, sketches) for k in sorted(ot.types)}
            if closed:
                out["additionalProperties"] = False
        required: set = set()
        req = f.get(C.REQUIRED)
        if req is not None and req.keys is not None:
            required |= req.keys
        if node.labels is not None:
            # Label equivalence: every object in this node has exactly these keys.
            required |= node.labels
        if required:
            out["required"] = sorted(required)
        deps = f.get(C.DEPENDENCIES)
        if deps is not None:
            # Keys that are always present make dependencies on or from them vacuous.
            always = required
            dependent = {}
            for k, v in deps.dependents().items():
                rest = [d for d in v if d not in always]
                if k not in always and rest:
                    dependent[k] = rest
            if dependent:
                out["dependentRequired"] = {k: dependent[k] for k in sorted(dependent)}
        ac = f.get(C.ATTRIBUTE_COUNTS)
        if ac is not None and ac.total:
            out[ANNOTATION_PREFIX + "object-count"] = ac.total
            out[ANNOTATION_PREFIX + "attribute-counts"] = {k: ac.counts[k] for k in sorted(ac.counts)}
            out[ANNOTATION_PREFIX + "attribute-frequencies"] = {
                k: ac.counts[k] / ac.total for k in sorted(ac.counts)
            }

    if kind in ("number", "string"):
        ex = f.get(C.EXAMPLES)
        if ex is not None and ex.total:
            out[ANNOTATION_PREFIX + "examples"] = {"total": ex.total, "values": list(ex.values)}
        hll = f.get(C.HLL)
        if hll is not None:
            out[ANNOTATION_PREFIX + "distinct-estimate"] = round(hll.estimate(), 3)
            if sketches:
                out[ANNOTATION_PREFIX + "hll"] = hll.to_state()
        bloom = f.get(C.BLOOM)
        if bloom is not None and sketches:
            out[ANNOTATION_PREFIX + "bloom"] = bloom.to_state()
    return out


def is_annotation(key: str) -> bool:
    return key.startswith(ANNOTATION_PREFIX)


def strip_annotations(schema, keys=None):
    """Remove ``x-jsonoid-*`` keys (or only ``keys`` when given), recursively.

    Property names inside ``properties`` are never touched.
    """
    drop = is_annotation if keys is None else frozenset(keys).__contains__
    return _strip(schema, drop)


def _strip(s, drop):
    if not isinstance(s, dict):
        return s
    out = {}
    for k, v in s.items():
        if drop(k):
            continue
        if k == "properties" and isinstance(v, dict):
            out[k] = {name: _strip(sub, drop) for name, sub in v.items()}
        elif k in ("items", "oneOf", "anyOf") and isinstance(v, list):
            out[k] = [_strip(sub, drop) for sub in v]
        elif k == "items":
            out[k] = _strip(v, drop)
        else:
            out[k] = v
    return out


def deterministic_view(schema: dict) -> dict:
    """Drop the annotations that depend on fold order or randomness."""
    return strip_annotations(schema, NONDETERMINISTIC_ANNOTATIONS)


def dumps(schema: dict) -> str:
    """Canonical text form: UTF-8 JSON, 2-space indent, sorted keys."""
    return json.dumps(schema, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def canonical_bytes(node: SchemaNode) -> bytes:
    """Bytes used to order product branches (deterministic parts only)."""
    frag = deterministic_view(_fragment(node, True, False))
    return json.dumps(frag, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
