"""Post-discovery analyses over a finished schema.

Key suggestions read the HyperLogLog and Bloom facets; outlier detection
walks one document alongside the schema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import config as C
from .formats import matches_format
from .schema import SchemaNode, kind_of, pointer, walk

SCALAR_KINDS = ("string", "number")
OUTLIER_FACETS = (C.STATS, C.MAXMIN_STRING, C.MAXMIN_ARRAY, C.FORMAT, C.ATTRIBUTE_COUNTS)


class AnalysisUnavailable(RuntimeError):
    """The schema lacks the facets an analysis needs."""


@dataclass
class ConstraintSuggestion:
    kind: str  # "primary-key" | "foreign-key"
    subject: str
    target: str | None = None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "subject": self.subject}
        if self.target is not None:
            out["target"] = self.target
        out["evidence"] = self.evidence
        return out


@dataclass
class OutlierReport:
    path: str
    category: str
    observed: object
    threshold: object

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "category": self.category,
            "detail": {"observed": self.observed, "threshold": self.threshold},
        }


def _has_facet(schema: SchemaNode, facet: str) -> bool:
    return schema.cfg.enabled(facet)


def _paths(schema: SchemaNode, include_arrays: bool):
    """Per path: list of nodes at that path, plus whether the path sits under an array."""
    paths: dict = {}
    for path, node, in_array in walk(schema):
        if not include_arrays and in_array:
            continue
        if node.kind == "any":
            continue
        entry = paths.setdefault(path, {"nodes": [], "in_array": in_array})
        entry["nodes"].append(node)
    return paths


def suggest_primary_keys(schema: SchemaNode, total_docs: int, sigmas: float = 2.0) -> list[ConstraintSuggestion]:
    """Attributes present in every document whose distinct-count estimate matches the document count.

    A path qualifies when it is reached through objects only, every
    document has a string or number there, and
    ``|estimate - total_docs| <= sigmas * 1.04 / sqrt(2**p) * total_docs``.
    Results are ordered by relative gap, smallest first, with
    non-integral numeric paths after all others.
    """
    if not _has_facet(schema, C.HLL):
        raise AnalysisUnavailable("primary-key suggestion needs the HLL facet")
    if total_docs <= 0:
        return []
    out = []
    fractional = []
    for path, entry in _paths(schema, include_arrays=False).items():
        nodes = entry["nodes"]
        if not path or any(n.kind not in SCALAR_KINDS for n in nodes):
            continue
        if sum(n.count for n in nodes) != total_docs:
            continue
        sketches = [n.facets.get(C.HLL) for n in nodes]
        if any(s is None for s in sketches):
            continue
        hll = sketches[0]
        for s in sketches[1:]:
            hll = hll.combine(s)
        est = hll.estimate()
        tol = sigmas * hll.standard_error() * total_docs
        gap = abs(est - total_docs)
        if gap <= tol:
            out.append(
                ConstraintSuggestion(
                    "primary-key",
                    pointer(path),
                    evidence={
                        "estimate": round(est, 3),
                        "total": total_docs,
                        "tolerance": round(tol, 3),
                        "relative_gap": gap / total_docs,
                    },
                )
            )
            fractional.append(any(n.kind == "number" and not n.integral for n in nodes))
    # Fractional numbers make poor keys, so they rank after strings and integers.
    order = sorted(range(len(out)), key=lambda i: (fractional[i], out[i].evidence["relative_gap"], out[i].subject))
    out = [out[i] for i in order]
    return out


def _merged_blooms(schema: SchemaNode) -> dict:
    filters: dict = {}
    for path, entry in _paths(schema, include_arrays=True).items():
        for node in entry["nodes"]:
            bloom = node.facets.get(C.BLOOM)
            if node.kind not in SCALAR_KINDS or bloom is None:
                continue
            key = pointer(path)
            filters[key] = bloom if key not in filters else filters[key].combine(bloom)
    return filters


def suggest_foreign_keys(schema: SchemaNode) -> list[ConstraintSuggestion]:
    """Ordered path pairs (A, B) whose Bloom filter bits satisfy A ⊆ B.

    Array element paths use ``*`` segments. Candidates are ranked by the
    ratio of fill ratios (subject over target), largest first.
    """
    if not _has_facet(schema, C.BLOOM):
        raise AnalysisUnavailable("foreign-key suggestion needs the Bloom facet")
    filters = _merged_blooms(schema)
    out = []
    for a, fa in filters.items():
        for b, fb in filters.items():
            if a == b or not fa.bits or not fa.issubset(fb):
                continue
            ra, rb = fa.fill_ratio(), fb.fill_ratio()
            out.append(
                ConstraintSuggestion(
                    "foreign-key",
                    a,
                    b,
                    evidence={"subset_bits": True, "subject_fill": ra, "target_fill": rb, "fill_ratio": ra / rb},
                )
            )
    out.sort(key=lambda s: (-s.evidence["fill_ratio"], s.subject, s.target))
    return out


def detect_outliers(schema: SchemaNode, doc, z_max: float = 3.0, f_min: float = 0.01) -> list[OutlierReport]:
    """Per-value outliers of one document relative to a discovered schema.

    Categories: ``numeric-zscore`` (|z| > z_max for a value outside the
    observed range), ``length-bound``, ``format-mismatch``,
    ``unknown-attribute`` and ``rare-attribute`` (frequency < f_min).
    """
    if not any(schema.cfg.enabled(f) for f in OUTLIER_FACETS):
        raise AnalysisUnavailable("outlier detection needs Stats, MaxMin, Format or AttributeCounts")
    out: list = []
    _outliers(schema, doc, (), z_max, f_min, out)
    return out


def _select(node: SchemaNode, value):
    if node.kind != "product":
        return node
    kind = kind_of(value)
    for b in node.branches:
        if b.kind != kind:
            continue
        if b.labels is not None and b.labels != frozenset(value):
            continue
        return b
    return None


def _outliers(node, x, path, z_max, f_min, out) -> None:
    node = _select(node, x)
    if node is None or node.kind == "any" or node.kind != kind_of(x):
        return
    f = node.facets
    where = pointer(path)
    if node.kind == "number":
        stats = f.get(C.STATS)
        if stats is not None and stats.n >= 2:
            mm = f.get(C.MAXMIN_NUMBER)
            inside = mm is not None and mm.min is not None and mm.min <= x <= mm.max
            std = math.sqrt(stats.m2 / stats.n)
            if std > 0:
                z = (x - stats.mean) / std
            else:
                z = 0.0 if x == stats.mean else math.inf
            if abs(z) > z_max and not inside:
                out.append(OutlierReport(where, "numeric-zscore", x, {"z": z if math.isfinite(z) else None, "z_max": z_max}))
    elif node.kind == "string":
        _length(f.get(C.MAXMIN_STRING), len(x), where, out)
        fmt = f.get(C.FORMAT)
        if fmt is not None and fmt.emitted is not None and not matches_format(x, fmt.emitted):
            out.append(OutlierReport(where, "format-mismatch", x, fmt.emitted))
    elif node.kind == "array":
        _length(f.get(C.MAXMIN_ARRAY), len(x), where, out)
        at = f.get(C.ARRAY_TYPE)
        if at is not None and at.mode is not None:
            for i, v in enumerate(x):
                if at.positions is not None:
                    if i < len(at.positions):
                        _outliers(at.positions[i], v, path + (i,), z_max, f_min, out)
                else:
                    _outliers(at.item, v, path + (i,), z_max, f_min, out)
    elif node.kind == "object":
        ot = f.get(C.OBJECT_TYPES)
        counts = f.get(C.ATTRIBUTE_COUNTS)
        for key, v in x.items():
            child_path = path + (key,)
            if ot is not None and key not in ot.types:
                out.append(OutlierReport(pointer(child_path), "unknown-attribute", key, None))
                continue
            if counts is not None and counts.total:
                freq = counts.frequency(key)
                if freq < f_min:
                    out.append(OutlierReport(pointer(child_path), "rare-attribute", freq, f_min))
            if ot is not None:
                _outliers(ot.types[key], v, child_path, z_max, f_min, out)


def _length(mm, n, where, out) -> None:
    if mm is None or mm.min is None:
        return
    if n < mm.min or n > mm.max:
        out.append(OutlierReport(where, "length-bound", n, [mm.min, mm.max]))


def histogram_ks(h1, h2) -> float:
    """Two-sample Kolmogorov-Smirnov statistic between histogram step CDFs."""
    if not h1.bins or not h2.bins:
        raise ValueError("KS distance needs two non-empty histograms")
    t1, t2 = h1.total, h2.total
    i = j = 0
    c1 = c2 = 0
    best = 0.0
    b1, b2 = h1.bins, h2.bins
    while i < len(b1) or j < len(b2):
        v1 = b1[i][0] if i < len(b1) else math.inf
        v2 = b2[j][0] if j < len(b2) else math.inf
        v = min(v1, v2)
        while i < len(b1) and b1[i][0] == v:
            c1 += b1[i][1]
            i += 1
        while j < len(b2) and b2[j][0] == v:
            c2 += b2[j][1]
            j += 1
        best = max(best, abs(c1 / t1 - c2 / t2))
    return best
