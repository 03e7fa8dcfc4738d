"""Synthetic document generation and schema accuracy / overfit measurement."""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field

from . import config as C
from .config import DiscoveryConfig
from .emit import emit_json_schema
from .fold import fold_streaming
from .schema import SchemaNode, walk
from .validate import is_valid

ALPHABET = string.ascii_letters + string.digits


class GenerationError(ValueError):
    pass


@dataclass
class GeneratorConfig:
    """Knobs for :func:`generate_documents`.

    ``inclusion_probability=None`` uses each attribute's observed
    frequency when the reference schema has AttributeCounts, else 0.5.
    """

    mode: str = "random"
    seed: int = 0
    inclusion_probability: float | None = None
    max_array_length: int = 8
    string_mean_length: float = 8.0
    string_max_length: int = 64
    number_bound: int = 1_000_000
    alphabet: str = ALPHABET

    def __post_init__(self):
        if self.mode not in ("random", "sampled"):
            raise ValueError(f"mode must be 'random' or 'sampled', got {self.mode!r}")


@dataclass
class EvalReport:
    total: int
    valid: int
    invalid: int
    validity_fraction: float | None
    split: dict | None = field(default=None)

    @property
    def overfit(self) -> float | None:
        """Fraction rejected; only meaningful for held-out documents."""
        if self.validity_fraction is None:
            return None
        return 1.0 - self.validity_fraction

    def to_dict(self) -> dict:
        out = {"total": self.total, "valid": self.valid, "invalid": self.invalid}
        if self.validity_fraction is not None:
            out["validity_fraction"] = self.validity_fraction
        if self.split is not None:
            out["split"] = self.split
            out["overfit"] = self.overfit
        return out


def _match(ref: SchemaNode | None, node: SchemaNode) -> SchemaNode | None:
    """Counterpart of ``node`` inside a reference schema, if any."""
    if ref is None:
        return None
    candidates = ref.branches if ref.kind == "product" else (ref,)
    for r in candidates:
        if r.kind == node.kind and (node.labels is None or r.labels == node.labels):
            return r
    return None


class _Generator:
    def __init__(self, cfg: GeneratorConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng

    def string(self) -> str:
        c = self.cfg
        p = 1.0 / (c.string_mean_length + 1.0)
        n = 0
        while n < c.string_max_length and self.rng.random() > p:
            n += 1
        return "".join(self.rng.choice(c.alphabet) for _ in range(n))

    def number(self, integral: bool):
        b = self.cfg.number_bound
        if integral:
            return self.rng.randint(-b, b)
        return self.rng.uniform(-b, b)

    def sample(self, ref):
        ex = ref.facets.get(C.EXAMPLES) if ref is not None else None
        if ex is None or not ex.values:
            return None
        return (self.rng.choice(ex.values),)

    def value(self, node: SchemaNode, ref: SchemaNode | None):
        rng = self.rng
        if node.kind == "product":
            node = rng.choice(node.branches)
        ref = _match(ref, node)
        kind = node.kind
        if kind == "null":
            return None
        if kind == "boolean":
            return rng.random() < 0.5
        if kind in ("number", "string"):
            if self.cfg.mode == "sampled":
                picked = self.sample(ref)
                if picked is not None:
                    return picked[0]
            return self.number(bool(node.integral)) if kind == "number" else self.string()
        if kind == "array":
            at = node.facets.get(C.ARRAY_TYPE)
            if at is None or at.mode is None:
                return []
            rat = ref.facets.get(C.ARRAY_TYPE) if ref is not None else None
            if at.positions is not None:
                rpos = rat.positions if rat is not None and rat.positions is not None else ()
                return [
                    self.value(p, rpos[i] if i < len(rpos) else None) for i, p in enumerate(at.positions)
                ]
            if at.item.kind == "any":
                return []
            ritem = rat.item if rat is not None else None
            n = rng.randint(0, self.cfg.max_array_length)
            return [self.value(at.item, ritem) for _ in range(n)]
        if kind == "object":
            ot = node.facets.get(C.OBJECT_TYPES)
            if ot is None:
                return {}
            rot = ref.facets.get(C.OBJECT_TYPES) if ref is not None else None
            counts = ref.facets.get(C.ATTRIBUTE_COUNTS) if ref is not None else None
            if counts is None:
                counts = node.facets.get(C.ATTRIBUTE_COUNTS)
            out = {}
            for key in sorted(ot.types):
                if node.labels is None:
                    if self.cfg.inclusion_probability is not None:
                        p = self.cfg.inclusion_probability
                    elif counts is not None and counts.total:
                        p = counts.frequency(key)
                    else:
                        p = 0.5
                    if rng.random() >= p:
                        continue
                out[key] = self.value(ot.types[key], rot.types.get(key) if rot is not None else None)
            return out
        raise GenerationError(f"cannot generate a value for kind {kind!r}")


def generate_documents(
    minimal_schema: SchemaNode, cfg: GeneratorConfig, n: int, reference: SchemaNode | None = None
) -> list:
    """``n`` documents with the attribute names and types of ``minimal_schema``.

    Random mode draws type-correct random values. Sampled mode draws leaf
    values from the Examples reservoirs of ``reference`` (defaults to
    ``minimal_schema`` itself).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if reference is None:
        reference = minimal_schema
    if cfg.mode == "sampled" and not any(C.EXAMPLES in node.facets for _, node, _ in walk(reference)):
        raise GenerationError("sampled mode needs a reference schema with Examples facets")
    if minimal_schema.kind == "any":
        return []
    gen = _Generator(cfg, random.Random(cfg.seed))
    return [gen.value(minimal_schema, reference) for _ in range(n)]


def exclude_conforming(docs, reference_schema: dict) -> list:
    """Drop documents valid against a hand-written reference schema (any draft)."""
    import jsonschema

    cls = jsonschema.validators.validator_for(reference_schema)
    validator = cls(reference_schema)
    return [d for d in docs if not validator.is_valid(d)]


def evaluate_validity(schema: dict, docs) -> EvalReport:
    """Fraction of ``docs`` accepted by an emitted schema."""
    total = valid = 0
    for d in docs:
        total += 1
        valid += is_valid(schema, d)
    frac = valid / total if total else None
    return EvalReport(total, valid, total - valid, frac)


def split_indices(n: int, train_fraction: float, seed: int) -> tuple[list, list]:
    """Seeded shuffle of ``range(n)`` cut into train and test index lists."""
    order = list(range(n))
    random.Random(seed).shuffle(order)
    cut = int(round(n * train_fraction))
    return order[:cut], order[cut:]


def overfit_split(
    corpus, cfg: DiscoveryConfig, train_fraction: float = 0.9, seed: int = 0, closed: bool = True
) -> EvalReport:
    """Discover on a seeded train split and report how the held-out split validates.

    ``report.overfit`` is the fraction of test documents rejected.
    """
    corpus = list(corpus)
    if len(corpus) < 10:
        raise ValueError("overfit evaluation needs at least 10 documents")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    train_idx, test_idx = split_indices(len(corpus), train_fraction, seed)
    if not test_idx:
        raise ValueError("test split is empty")
    schema = emit_json_schema(fold_streaming((corpus[i] for i in train_idx), cfg), closed=closed)
    report = evaluate_validity(schema, (corpus[i] for i in test_idx))
    report.split = {"train": len(train_idx), "test": len(test_idx), "train_fraction": train_fraction, "seed": seed}
    return report
