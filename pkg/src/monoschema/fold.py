"""Streaming and tree-reduce folds over document collections."""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor

from .config import DiscoveryConfig
from .ingest import partition
from .schema import SchemaNode, any_node, discover_document, ensure_recursion_limit, merge_schemas


class FoldError(RuntimeError):
    """A worker failed during tree-reduce discovery."""


def derive_rng(seed: int, *path: int) -> random.Random:
    """Independent generator for a (seed, worker, ...) coordinate."""
    x = seed & 0xFFFFFFFFFFFFFFFF
    for p in path:
        x = (x * 0x9E3779B97F4A7C15 + p + 1) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 31
    return random.Random(x)


def fold_streaming(docs, cfg: DiscoveryConfig, rng: random.Random | None = None) -> SchemaNode:
    """Left fold: schema(d1) ⊗ schema(d2) ⊗ ...; holds one document at a time.

    An empty input yields the ``any`` schema.
    """
    ensure_recursion_limit()
    if rng is None:
        rng = derive_rng(cfg.rng_seed, 0)
    acc = any_node(cfg)
    for doc in docs:
        acc = merge_schemas(acc, discover_document(doc, cfg), rng)
    return acc


def resolve_workers(workers: int) -> int:
    if workers == 0:
        return os.cpu_count() or 1
    if workers < 0:
        raise ValueError("workers must be >= 0")
    return workers


def tree_reduce(schemas: list, cfg: DiscoveryConfig, executor=None) -> SchemaNode:
    """Pairwise reduction in rounds; logarithmic depth."""
    level = list(schemas)
    if not level:
        return any_node(cfg)
    rnd = 0
    while len(level) > 1:
        rnd += 1
        pairs = [(level[i], level[i + 1], derive_rng(cfg.rng_seed, 1_000_000 + rnd, i)) for i in range(0, len(level) - 1, 2)]
        if executor is None:
            merged = [merge_schemas(a, b, r) for a, b, r in pairs]
        else:
            merged = list(executor.map(lambda t: merge_schemas(*t), pairs))
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    return level[0]


def fold_tree(batches, cfg: DiscoveryConfig, workers: int = 1) -> SchemaNode:
    """Discover each batch in parallel, then tree-reduce the batch schemas.

    ``batches`` is a list of document lists (see :func:`monoschema.ingest.partition`).
    Each batch gets its own generator seeded from ``(cfg.rng_seed, batch index)``.
    """
    ensure_recursion_limit()
    workers = resolve_workers(workers)
    batches = list(batches)

    def run(i):
        return fold_streaming(batches[i], cfg, derive_rng(cfg.rng_seed, i))

    try:
        if workers == 1:
            partial = [run(i) for i in range(len(batches))]
            return tree_reduce(partial, cfg)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(run, range(len(batches))))
            return tree_reduce(partial, cfg, pool)
    except Exception as exc:
        raise FoldError(str(exc)) from exc


def discover(docs, cfg: DiscoveryConfig, mode: str = "streaming", workers: int = 1) -> SchemaNode:
    """Convenience entry point choosing the fold strategy."""
    if mode == "streaming":
        return fold_streaming(docs, cfg)
    if mode == "tree":
        n = resolve_workers(workers)
        if not hasattr(docs, "__len__"):
            docs = list(docs)
        return fold_tree(partition(docs, n), cfg, n)
    raise ValueError(f"mode must be 'streaming' or 'tree', got {mode!r}")
