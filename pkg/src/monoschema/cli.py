"""Command-line interface.

Exit status: 0 ok, 1 usage error, 2 data error, 3 analysis unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

from . import config as C
from .analysis import AnalysisUnavailable, detect_outliers, suggest_foreign_keys, suggest_primary_keys
from .config import DiscoveryConfig, facet_set_name
from .emit import dumps, emit_json_schema
from .evalgen import EvalReport, GenerationError, GeneratorConfig, exclude_conforming, generate_documents, overfit_split
from .fold import FoldError, discover
from .ingest import FORMATS, ParseError, read_documents
from .schema import DepthError, project
from .state import SchemaState, StateError, load_state, save_state
from .validate import SchemaError, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_UNAVAILABLE = 3

PROG = "monoschema"


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _line(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _warn(msg: str) -> None:
    print(f"{PROG}: {msg}", file=sys.stderr)


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


class _Corpus:
    """All documents from the given inputs (stdin when none), with skip accounting."""

    def __init__(self, inputs, fmt):
        self.inputs = inputs or ["-"]
        self.format = fmt
        self.streams = []

    def __iter__(self):
        for src in self.inputs:
            stream = read_documents(src, self.format)
            self.streams.append(stream)
            try:
                yield from stream
            except OSError as exc:
                raise DataError(f"cannot read {src}: {exc}") from None

    @property
    def count(self) -> int:
        return sum(s.count for s in self.streams)

    @property
    def skipped(self) -> int:
        return sum(s.errors for s in self.streams)

    def report(self) -> None:
        for s in self.streams:
            for d in s.diagnostics:
                kind = "skipped" if d.fatal else "warning"
                _warn(f"{s.name}:{d.line}: {kind}: {d.message}")

    def check(self) -> None:
        """Data error when every line of the input failed to parse."""
        self.report()
        if self.count == 0 and self.skipped > 0:
            raise DataError("no input line could be parsed")


def _config(args) -> DiscoveryConfig:
    try:
        return DiscoveryConfig.from_monoids(
            args.monoids,
            equivalence=args.equivalence,
            rng_seed=args.seed,
            reservoir_capacity=args.reservoir_capacity,
            histogram_max_bins=args.histogram_bins,
            bloom_bits=args.bloom_bits,
            bloom_hashes=args.bloom_hashes,
            hll_precision=args.hll_precision,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


class _UsageError(Exception):
    pass


def _load_state(path) -> SchemaState:
    try:
        return load_state(path)
    except OSError as exc:
        raise DataError(f"cannot read state {path}: {exc}") from None
    except (StateError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"invalid state file {path}: {exc}") from None


def _load_json(path):
    try:
        with open(path, encoding="utf-8-sig") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None


def cmd_discover(args) -> int:
    cfg = _config(args)
    corpus = _Corpus(args.inputs, args.format)
    start = time.perf_counter()
    docs = list(corpus) if args.mode == "tree" else corpus
    schema = discover(docs, cfg, args.mode, args.workers)
    runtime = time.perf_counter() - start
    corpus.check()
    emitted = emit_json_schema(schema, closed=not args.open, include_sketches=args.include_sketches)
    with _output(args.out) as fh:
        fh.write(dumps(emitted))
    if args.save_state:
        save_state(args.save_state, SchemaState(schema, cfg, corpus.count, corpus.skipped))
    stats = {
        "docs": corpus.count,
        "skipped": corpus.skipped,
        "runtime": round(runtime, 6),
        "docs_per_sec": round(corpus.count / runtime, 3) if runtime > 0 else None,
        "monoids": facet_set_name(cfg.facets),
        "mode": args.mode,
        "workers": args.workers,
        "equivalence": cfg.equivalence,
    }
    print(_line(stats), file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    schema = _load_json(args.schema)
    corpus = _Corpus(args.inputs, args.format)
    verdicts = []

    def docs():
        for i, doc in enumerate(corpus):
            outcome = validate(schema, doc)
            verdicts.append(outcome.valid)
            rec = {"index": i, "valid": outcome.valid}
            if not outcome.valid:
                rec["violations"] = [v.to_dict() for v in outcome.violations]
            yield rec

    try:
        with _output(args.out) as fh:
            for rec in docs():
                fh.write(_line(rec) + "\n")
            corpus.check()
            total, valid = len(verdicts), sum(verdicts)
            report = EvalReport(total, valid, total - valid, valid / total if total else None)
            fh.write(_line({"summary": report.to_dict()}) + "\n")
    except SchemaError as exc:
        raise DataError(f"unsupported schema: {exc}") from None
    return EXIT_OK


def cmd_constraints(args) -> int:
    state = _load_state(args.state)
    schema = state.schema
    if not (schema.cfg.enabled(C.HLL) or schema.cfg.enabled(C.BLOOM)):
        raise AnalysisUnavailable("state has neither HLL nor Bloom sketches; rediscover with --monoids all")
    out = []
    if schema.cfg.enabled(C.HLL):
        out += suggest_primary_keys(schema, state.documents, args.sigmas)
    if schema.cfg.enabled(C.BLOOM):
        out += suggest_foreign_keys(schema)
    with _output(args.out) as fh:
        for s in out:
            fh.write(_line(s.to_dict()) + "\n")
    return EXIT_OK


def cmd_outliers(args) -> int:
    state = _load_state(args.state)
    corpus = _Corpus(args.inputs, args.format)
    with _output(args.out) as fh:
        for i, doc in enumerate(corpus):
            for rep in detect_outliers(state.schema, doc, args.z_max, args.f_min):
                fh.write(_line({"document": i, **rep.to_dict()}) + "\n")
        corpus.check()
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.n < 0:
        raise _UsageError("--n must be >= 0")
    if args.state:
        reference = _load_state(args.state).schema
    else:
        cfg = _config(args)
        corpus = _Corpus(args.inputs, args.format)
        reference = discover(corpus, cfg)
        corpus.check()
    minimal = project(reference, C.MIN_FACETS)
    gcfg = GeneratorConfig(
        mode=args.mode,
        seed=args.seed,
        inclusion_probability=args.inclusion_probability,
        max_array_length=args.max_array_length,
    )
    docs = generate_documents(minimal, gcfg, args.n, reference)
    if args.exclude_conforming:
        docs = exclude_conforming(docs, _load_json(args.exclude_conforming))
    with _output(args.out) as fh:
        for d in docs:
            fh.write(json.dumps(d, ensure_ascii=False) + "\n")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    corpus = _Corpus(args.inputs, args.format)
    docs = list(corpus)
    corpus.check()
    if not 0.0 < args.split < 1.0:
        raise _UsageError("--split must be in (0, 1)")
    try:
        report = overfit_split(docs, cfg, args.split, args.seed, closed=not args.open)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    with _output(args.out) as fh:
        fh.write(_line(report.to_dict()) + "\n")
    return EXIT_OK


def _inputs(p) -> None:
    p.add_argument("inputs", nargs="*", help="NDJSON files (stdin when omitted)")
    p.add_argument("--format", choices=FORMATS, default="ndjson", help="input format")


def _discovery(p) -> None:
    p.add_argument("--monoids", default="all", help="min, simple, all, or a comma-separated facet list")
    p.add_argument("--equivalence", choices=C.EQUIVALENCES, default="kind")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reservoir-capacity", type=int, default=100)
    p.add_argument("--histogram-bins", type=int, default=100)
    p.add_argument("--bloom-bits", type=int, default=65536)
    p.add_argument("--bloom-hashes", type=int, default=7)
    p.add_argument("--hll-precision", type=int, default=12)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Monoid-based JSON Schema discovery")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("discover", help="discover a schema from documents")
    _inputs(p)
    _discovery(p)
    p.add_argument("--mode", choices=("streaming", "tree"), default="streaming")
    p.add_argument("--workers", type=int, default=1, help="tree-mode worker threads; 0 = CPU count")
    p.add_argument("--out", help="schema output file (stdout by default)")
    p.add_argument("--save-state", metavar="FILE", help="write the full schema state with sketches")
    p.add_argument("--open", action="store_true", help="omit additionalProperties:false")
    p.add_argument("--include-sketches", action="store_true", help="embed Bloom/HLL payloads as annotations")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("validate", help="validate documents against an emitted schema")
    p.add_argument("schema", help="schema JSON file")
    _inputs(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("constraints", help="suggest primary and foreign keys from a state file")
    p.add_argument("state", help="file written by discover --save-state")
    p.add_argument("--sigmas", type=float, default=2.0, help="HLL error tolerance for key suggestion")
    p.add_argument("--out")
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("outliers", help="report outlying values of documents against a state file")
    p.add_argument("state", help="file written by discover --save-state")
    _inputs(p)
    p.add_argument("--z-max", type=float, default=3.0)
    p.add_argument("--f-min", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_outliers)

    p = sub.add_parser("generate", help="generate synthetic documents with a discovered structure")
    _inputs(p)
    _discovery(p)
    p.add_argument("--state", help="use a saved state instead of discovering from inputs")
    p.add_argument("--mode", choices=("random", "sampled"), default="random")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--inclusion-probability", type=float, default=None)
    p.add_argument("--max-array-length", type=int, default=8)
    p.add_argument("--exclude-conforming", metavar="SCHEMA", help="drop documents valid against this reference schema")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="train/test overfit evaluation")
    _inputs(p)
    _discovery(p)
    p.add_argument("--split", type=float, default=0.9, help="train fraction")
    p.add_argument("--open", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        _warn(f"error: {exc}")
        return EXIT_USAGE
    except AnalysisUnavailable as exc:
        _warn(f"analysis unavailable: {exc}")
        return EXIT_UNAVAILABLE
    except GenerationError as exc:
        _warn(f"analysis unavailable: {exc}")
        return EXIT_UNAVAILABLE
    except (DataError, ParseError, DepthError, FoldError) as exc:
        _warn(f"error: {exc}")
        return EXIT_DATA
    except OSError as exc:
        _warn(f"error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
