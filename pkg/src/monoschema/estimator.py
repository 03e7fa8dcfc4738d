"""scikit-learn style wrapper around discovery, validation and outlier scoring."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .analysis import detect_outliers
from .config import DiscoveryConfig
from .emit import emit_json_schema
from .fold import derive_rng, discover
from .schema import any_node, discover_document, ensure_recursion_limit, merge_schemas
from .validate import is_valid

OUTLIER_CATEGORIES = ("numeric-zscore", "length-bound", "format-mismatch", "unknown-attribute", "rare-attribute")


def check_documents(X) -> list:
    """Coerce ``X`` to a list of JSON values, rejecting non-JSON inputs early."""
    if isinstance(X, (str, bytes, dict)):
        raise TypeError("X must be an iterable of documents, not a single document")
    docs = list(X)
    for i, d in enumerate(docs):
        _check_value(d, i)
    return docs


def _check_value(v, i) -> None:
    stack = [v]
    while stack:
        x = stack.pop()
        if x is None or isinstance(x, (bool, int, str)):
            continue
        if isinstance(x, float):
            if x != x or x in (float("inf"), float("-inf")):
                raise ValueError(f"document {i} contains a non-finite number")
            continue
        if isinstance(x, dict):
            for k in x:
                if not isinstance(k, str):
                    raise TypeError(f"document {i} has a non-string object key {k!r}")
            stack.extend(x.values())
        elif isinstance(x, (list, tuple)):
            stack.extend(x)
        else:
            raise TypeError(f"document {i} contains a non-JSON value of type {type(x).__name__}")


class SchemaDiscoverer(BaseEstimator):
    """Discover a JSON Schema from documents.

    ``predict`` returns one boolean per document (valid or not), ``score``
    the validity fraction, and ``transform`` a matrix of outlier counts with
    one column per category in :data:`OUTLIER_CATEGORIES`.
    """

    def __init__(
        self,
        monoids="all",
        equivalence="kind",
        mode="streaming",
        n_workers=1,
        closed=True,
        reservoir_capacity=100,
        histogram_max_bins=100,
        bloom_bits=65536,
        bloom_hashes=7,
        hll_precision=12,
        z_max=3.0,
        f_min=0.01,
        random_state=0,
    ):
        self.monoids = monoids
        self.equivalence = equivalence
        self.mode = mode
        self.n_workers = n_workers
        self.closed = closed
        self.reservoir_capacity = reservoir_capacity
        self.histogram_max_bins = histogram_max_bins
        self.bloom_bits = bloom_bits
        self.bloom_hashes = bloom_hashes
        self.hll_precision = hll_precision
        self.z_max = z_max
        self.f_min = f_min
        self.random_state = random_state

    def _config(self) -> DiscoveryConfig:
        return DiscoveryConfig.from_monoids(
            self.monoids,
            equivalence=self.equivalence,
            reservoir_capacity=self.reservoir_capacity,
            histogram_max_bins=self.histogram_max_bins,
            bloom_bits=self.bloom_bits,
            bloom_hashes=self.bloom_hashes,
            hll_precision=self.hll_precision,
            rng_seed=int(self.random_state or 0),
        )

    def fit(self, X, y=None):
        docs = check_documents(X)
        self.config_ = self._config()
        self.schema_ = discover(docs, self.config_, self.mode, self.n_workers)
        self.n_documents_ = len(docs)
        self.n_partial_ = 0
        self.json_schema_ = emit_json_schema(self.schema_, closed=self.closed)
        return self

    def partial_fit(self, X, y=None):
        """Merge another batch into the current schema (fits from scratch if unfitted)."""
        docs = check_documents(X)
        if not hasattr(self, "schema_"):
            self.config_ = self._config()
            self.schema_ = any_node(self.config_)
            self.n_documents_ = 0
            self.n_partial_ = 0
        ensure_recursion_limit()
        self.n_partial_ += 1
        rng = derive_rng(self.config_.rng_seed, 2_000_000 + self.n_partial_)
        for d in docs:
            self.schema_ = merge_schemas(self.schema_, discover_document(d, self.config_), rng)
        self.n_documents_ += len(docs)
        self.json_schema_ = emit_json_schema(self.schema_, closed=self.closed)
        return self

    def _check_fitted(self):
        if not hasattr(self, "schema_"):
            raise NotFittedError("SchemaDiscoverer is not fitted yet; call fit first")

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        docs = check_documents(X)
        return np.array([is_valid(self.json_schema_, d) for d in docs], dtype=bool)

    def score(self, X, y=None) -> float:
        pred = self.predict(X)
        if pred.size == 0:
            return float("nan")
        return float(pred.mean())

    def transform(self, X) -> np.ndarray:
        self._check_fitted()
        docs = check_documents(X)
        out = np.zeros((len(docs), len(OUTLIER_CATEGORIES)), dtype=np.int64)
        col = {c: j for j, c in enumerate(OUTLIER_CATEGORIES)}
        for i, d in enumerate(docs):
            for rep in detect_outliers(self.schema_, d, self.z_max, self.f_min):
                out[i, col[rep.category]] += 1
        return out

    def fit_transform(self, X, y=None):
        docs = check_documents(X)
        return self.fit(docs).transform(docs)
