"""Reading JSON documents (NDJSON or a whole-file array) and partitioning them."""

from __future__ import annotations

import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .schema import ensure_recursion_limit

MAX_DEPTH = 1000
FORMATS = ("ndjson", "json-array")


class ParseError(ValueError):
    pass


@dataclass
class Diagnostic:
    line: int
    message: str
    fatal: bool = True

    def to_dict(self) -> dict:
        return {"line": self.line, "message": self.message, "skipped": self.fatal}


def _reject_constant(name):
    raise ParseError(f"{name} is not valid JSON")


def _finite_float(text):
    x = float(text)
    if not math.isfinite(x):
        raise ParseError(f"number {text} overflows a double")
    return x


def _depth_exceeds(value, limit: int) -> bool:
    stack = [(value, 1)]
    while stack:
        v, d = stack.pop()
        if d > limit:
            return True
        if isinstance(v, dict):
            stack.extend((c, d + 1) for c in v.values() if isinstance(c, (dict, list)))
        elif isinstance(v, list):
            stack.extend((c, d + 1) for c in v if isinstance(c, (dict, list)))
    return False


class DocumentStream:
    """Iterator over the documents of one source.

    Malformed lines are skipped and recorded in ``diagnostics``; duplicate
    object keys keep the last value and are recorded as non-fatal
    diagnostics. ``count`` is the number of documents yielded so far.
    """

    def __init__(self, source, fmt: str = "ndjson", max_depth: int = MAX_DEPTH):
        if fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
        self.source = source
        self.format = fmt
        self.max_depth = max_depth
        ensure_recursion_limit(max_depth)
        self.count = 0
        self.errors = 0
        self.diagnostics: list[Diagnostic] = []
        self._line = 0
        self._decoder = json.JSONDecoder(
            object_pairs_hook=self._pairs,
            parse_constant=_reject_constant,
            parse_float=_finite_float,
        )

    @property
    def name(self) -> str:
        if isinstance(self.source, (str, Path)):
            return str(self.source)
        return getattr(self.source, "name", "<stream>")

    def _pairs(self, pairs):
        obj = dict(pairs)
        if len(obj) != len(pairs):
            seen = set()
            dups = sorted({k for k, _ in pairs if k in seen or seen.add(k)})
            self.diagnostics.append(Diagnostic(self._line, f"duplicate keys {dups}; last value kept", fatal=False))
        return obj

    def _parse(self, text: str):
        try:
            value = self._decoder.decode(text)
        except RecursionError:
            raise ParseError(f"nesting deeper than {self.max_depth}") from None
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        if len(text) > self.max_depth and _depth_exceeds(value, self.max_depth):
            raise ParseError(f"nesting deeper than {self.max_depth}")
        return value

    def _open(self):
        if isinstance(self.source, (str, Path)):
            return open(self.source, encoding="utf-8-sig", newline=None)
        if isinstance(self.source, io.TextIOBase) or hasattr(self.source, "read"):
            return _NoClose(self.source)
        raise TypeError(f"unsupported source {self.source!r}")

    def __iter__(self):
        with self._open() as fh:
            if self.format == "json-array":
                yield from self._iter_array(fh)
            else:
                yield from self._iter_lines(fh)

    def _iter_lines(self, fh):
        for lineno, line in enumerate(fh, 1):
            self._line = lineno
            if lineno == 1 and line.startswith("﻿"):
                line = line[1:]
            if not line.strip():
                continue
            try:
                doc = self._parse(line)
            except ParseError as exc:
                self.errors += 1
                self.diagnostics.append(Diagnostic(lineno, str(exc)))
                continue
            self.count += 1
            yield doc

    def _iter_array(self, fh):
        text = fh.read().lstrip("﻿")
        self._line = 1
        try:
            docs = self._parse(text)
        except ParseError as exc:
            self.errors += 1
            self.diagnostics.append(Diagnostic(1, str(exc)))
            return
        if not isinstance(docs, list):
            self.errors += 1
            self.diagnostics.append(Diagnostic(1, "top-level value is not an array"))
            return
        for doc in docs:
            self.count += 1
            yield doc


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        return False


def read_documents(source=None, fmt: str = "ndjson") -> DocumentStream:
    """Stream documents from a path, an open text file, or stdin (``None`` / ``"-"``)."""
    if source is None or source == "-":
        source = sys.stdin
    return DocumentStream(source, fmt)


def parse_documents(text: str, fmt: str = "ndjson") -> DocumentStream:
    return DocumentStream(io.StringIO(text), fmt)


def partition(docs, workers: int) -> list[list]:
    """Split documents into ``workers`` batches.

    Sized inputs become contiguous batches whose sizes differ by at most
    one; other iterables are dealt round-robin.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if hasattr(docs, "__len__") and hasattr(docs, "__getitem__"):
        n = len(docs)
        base, extra = divmod(n, workers)
        out, start = [], 0
        for i in range(workers):
            size = base + (1 if i < extra else 0)
            out.append(list(docs[start : start + size]))
            start += size
        return out
    out = [[] for _ in range(workers)]
    for i, doc in enumerate(docs):
        out[i % workers].append(doc)
    return out
