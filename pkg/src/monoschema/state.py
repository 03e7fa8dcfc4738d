"""Lossless schema-state files.

A state file is the magic line ``JZST1`` followed by one JSON object
holding the configuration, the document count and the full schema tree
with every facet (sketch payloads included). Emitted JSON Schemas drop
most of that; the state keeps it for later analysis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import config as C
from .config import DiscoveryConfig
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
from .moments import MomentsAccumulator
from .pds import BloomFilter, HyperLogLog, StreamingHistogram
from .schema import SchemaNode

MAGIC = b"JZST1\n"
FORMAT_VERSION = 1


class StateError(ValueError):
    pass


@dataclass
class SchemaState:
    schema: SchemaNode
    config: DiscoveryConfig
    documents: int
    skipped: int = 0


def node_to_state(node: SchemaNode) -> dict:
    out: dict = {"kind": node.kind, "count": node.count}
    if node.kind == "product":
        out["branches"] = [node_to_state(b) for b in node.branches]
        return out
    if node.integral is not None:
        out["integral"] = node.integral
    if node.labels is not None:
        out["labels"] = sorted(node.labels)
    if node.facets:
        out["facets"] = {name: _facet_to_state(name, f) for name, f in sorted(node.facets.items())}
    return out


def _facet_to_state(name: str, f):
    if name == C.OBJECT_TYPES:
        return {k: node_to_state(v) for k, v in f.types.items()}
    if name == C.ARRAY_TYPE:
        if f.positions is not None:
            return {"positions": [node_to_state(p) for p in f.positions]}
        if f.item is not None:
            return {"item": node_to_state(f.item)}
        return {}
    if name == C.REQUIRED:
        return None if f.keys is None else sorted(f.keys)
    if name == C.ATTRIBUTE_COUNTS:
        return {"counts": f.counts, "total": f.total}
    if name == C.DEPENDENCIES:
        return {"counts": f.counts, "pairs": [[a, b, n] for (a, b), n in sorted(f.pairs.items())]}
    if name == C.UNIQUE:
        return f.is_unique
    if name in (C.MAXMIN_NUMBER, C.MAXMIN_STRING, C.MAXMIN_ARRAY):
        return [f.min, f.max]
    if name == C.MULTIPLE:
        return [f.gcd, f.disabled]
    if name == C.PATTERN:
        return [f.prefix, f.suffix]
    if name == C.FORMAT:
        return f.format
    if name == C.EXAMPLES:
        return {"values": list(f.values), "total": f.total, "capacity": f.capacity}
    if name in (C.BLOOM, C.HLL, C.HISTOGRAM, C.STATS):
        return f.to_state()
    raise StateError(f"unknown facet {name!r}")


def node_from_state(d: dict, cfg: DiscoveryConfig) -> SchemaNode:
    kind = d["kind"]
    if kind == "product":
        return SchemaNode("product", cfg, branches=[node_from_state(b, cfg) for b in d["branches"]], count=d["count"])
    facets = {name: _facet_from_state(name, v, cfg) for name, v in d.get("facets", {}).items()}
    labels = frozenset(d["labels"]) if "labels" in d else None
    return SchemaNode(kind, cfg, facets, integral=d.get("integral"), count=d["count"], labels=labels)


def _facet_from_state(name: str, v, cfg):
    if name == C.OBJECT_TYPES:
        return ObjectTypes({k: node_from_state(s, cfg) for k, s in v.items()})
    if name == C.ARRAY_TYPE:
        if "positions" in v:
            return ArrayType(positions=tuple(node_from_state(p, cfg) for p in v["positions"]))
        if "item" in v:
            return ArrayType(item=node_from_state(v["item"], cfg))
        return ArrayType()
    if name == C.REQUIRED:
        return Required(None if v is None else frozenset(v))
    if name == C.ATTRIBUTE_COUNTS:
        return AttributeCounts(dict(v["counts"]), v["total"])
    if name == C.DEPENDENCIES:
        return Dependencies(dict(v["counts"]), {(a, b): n for a, b, n in v["pairs"]})
    if name == C.UNIQUE:
        return Unique(bool(v))
    if name in (C.MAXMIN_NUMBER, C.MAXMIN_STRING, C.MAXMIN_ARRAY):
        return MaxMin(v[0], v[1])
    if name == C.MULTIPLE:
        return Multiple(v[0], v[1])
    if name == C.PATTERN:
        return Pattern(v[0], v[1])
    if name == C.FORMAT:
        return Format(v)
    if name == C.EXAMPLES:
        return Examples(tuple(v["values"]), v["total"], v["capacity"])
    if name == C.BLOOM:
        return BloomFilter.from_state(v)
    if name == C.HLL:
        return HyperLogLog.from_state(v)
    if name == C.HISTOGRAM:
        return StreamingHistogram.from_state(v)
    if name == C.STATS:
        return MomentsAccumulator.from_state(v)
    raise StateError(f"unknown facet {name!r}")


def dumps_state(state: SchemaState) -> bytes:
    body = {
        "format_version": FORMAT_VERSION,
        "config": state.config.to_dict(),
        "documents": state.documents,
        "skipped": state.skipped,
        "schema": node_to_state(state.schema),
    }
    return MAGIC + json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def loads_state(data: bytes) -> SchemaState:
    if not data.startswith(MAGIC):
        raise StateError("not a schema state file (missing JZST1 header)")
    try:
        body = json.loads(data[len(MAGIC) :].decode("utf-8"))
    except ValueError as exc:
        raise StateError(f"corrupt state file: {exc}") from None
    if body.get("format_version") != FORMAT_VERSION:
        raise StateError(f"unsupported state version {body.get('format_version')!r}")
    cfg = DiscoveryConfig.from_dict(body["config"])
    return SchemaState(node_from_state(body["schema"], cfg), cfg, body["documents"], body.get("skipped", 0))


def save_state(path, state: SchemaState) -> None:
    Path(path).write_bytes(dumps_state(state))


def load_state(path) -> SchemaState:
    return loads_state(Path(path).read_bytes())
