"""Monoid-based JSON Schema discovery."""

from .analysis import (
    AnalysisUnavailable,
    ConstraintSuggestion,
    OutlierReport,
    detect_outliers,
    histogram_ks,
    suggest_foreign_keys,
    suggest_primary_keys,
)
from .config import ALL_FACETS, MIN_FACETS, SIMPLE_FACETS, DiscoveryConfig, parse_facets
from .emit import deterministic_view, dumps, emit_json_schema
from .estimator import SchemaDiscoverer
from .evalgen import EvalReport, GeneratorConfig, evaluate_validity, generate_documents, overfit_split
from .fold import discover, fold_streaming, fold_tree, tree_reduce
from .ingest import parse_documents, read_documents
from .moments import MomentsAccumulator
from .pds import BloomFilter, HyperLogLog, StreamingHistogram
from .schema import SchemaNode, discover_document, merge_schemas
from .state import SchemaState, load_state, save_state
from .validate import is_valid, validate

__version__ = "0.1.0"

__all__ = [
    "ALL_FACETS",
    "MIN_FACETS",
    "SIMPLE_FACETS",
    "AnalysisUnavailable",
    "BloomFilter",
    "ConstraintSuggestion",
    "DiscoveryConfig",
    "EvalReport",
    "GeneratorConfig",
    "HyperLogLog",
    "MomentsAccumulator",
    "OutlierReport",
    "SchemaDiscoverer",
    "SchemaNode",
    "SchemaState",
    "StreamingHistogram",
    "detect_outliers",
    "deterministic_view",
    "discover",
    "discover_document",
    "dumps",
    "emit_json_schema",
    "evaluate_validity",
    "fold_streaming",
    "fold_tree",
    "generate_documents",
    "histogram_ks",
    "is_valid",
    "load_state",
    "merge_schemas",
    "overfit_split",
    "parse_documents",
    "parse_facets",
    "read_documents",
    "save_state",
    "suggest_foreign_keys",
    "suggest_primary_keys",
    "tree_reduce",
    "validate",
]
