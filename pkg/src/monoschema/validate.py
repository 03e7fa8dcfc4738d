"""Validator for the keyword subset that :mod:`monoschema.emit` produces.

This is deliberately not a general JSON Schema validator. Any keyword
outside the emitted subset raises :class:`SchemaError` instead of being
silently ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .emit import is_annotation
from .formats import matches_format
from .hashing import canonical_json

KEYWORDS = frozenset(
    {
        "$schema",
        "type",
        "properties",
        "additionalProperties",
        "required",
        "dependentRequired",
        "items",
        "additionalItems",
        "minItems",
        "maxItems",
        "uniqueItems",
        "minLength",
        "maxLength",
        "pattern",
        "format",
        "minimum",
        "maximum",
        "multipleOf",
        "oneOf",
        "anyOf",
    }
)


class SchemaError(ValueError):
    """The schema uses something outside the supported keyword subset."""


@dataclass
class Violation:
    path: str
    keyword: str
    message: str

    def to_dict(self) -> dict:
        return {"path": self.path, "keyword": self.keyword, "message": self.message}


@dataclass
class ValidationOutcome:
    valid: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.valid


@lru_cache(maxsize=1024)
def _regex(pattern: str):
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise SchemaError(f"bad pattern {pattern!r}: {exc}") from None


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _type_ok(t: str, x) -> bool:
    if t == "object":
        return isinstance(x, dict)
    if t == "array":
        return isinstance(x, list)
    if t == "string":
        return isinstance(x, str)
    if t == "number":
        return _is_number(x)
    if t == "integer":
        return _is_number(x) and (isinstance(x, int) or x.is_integer())
    if t == "boolean":
        return isinstance(x, bool)
    if t == "null":
        return x is None
    raise SchemaError(f"unknown type {t!r}")


def _esc(seg) -> str:
    return str(seg).replace("~", "~0").replace("/", "~1")


def validate(schema, doc, *, first_error: bool = False) -> ValidationOutcome:
    """Check ``doc`` against an emitted schema; collects every violation."""
    errors: list = []
    _check(schema, doc, "", errors, first_error)
    return ValidationOutcome(not errors, errors)


def is_valid(schema, doc) -> bool:
    return validate(schema, doc, first_error=True).valid


def _check(s, x, path: str, errors: list, stop: bool) -> None:
    if s is True or s == {}:
        return
    if s is False:
        errors.append(Violation(path, "false", "no value is allowed here"))
        return
    if not isinstance(s, dict):
        raise SchemaError(f"schema at {path or '/'} is not an object")
    for k in s:
        if k not in KEYWORDS and not is_annotation(k):
            raise SchemaError(f"unsupported keyword {k!r} at {path or '/'}")

    def fail(keyword, message):
        errors.append(Violation(path, keyword, message))

    if "oneOf" in s:
        matched = sum(1 for sub in s["oneOf"] if is_valid(sub, x))
        if matched != 1:
            fail("oneOf", f"{matched} alternatives matched, expected exactly 1")
            if stop:
                return
    if "anyOf" in s and not any(is_valid(sub, x) for sub in s["anyOf"]):
        fail("anyOf", "no alternative matched")
        if stop:
            return

    t = s.get("type")
    if t is not None and not _type_ok(t, x):
        fail("type", f"expected {t}")
        return

    if isinstance(x, dict):
        props = s.get("properties", {})
        for key in s.get("required", ()):
            if key not in x:
                fail("required", f"missing property {key!r}")
        for key, deps in s.get("dependentRequired", {}).items():
            if key in x:
                missing = [d for d in deps if d not in x]
                if missing:
                    fail("dependentRequired", f"{key!r} requires {missing}")
        extra_ok = s.get("additionalProperties", True)
        for key, val in x.items():
            if key in props:
                _check(props[key], val, f"{path}/{_esc(key)}", errors, stop)
            elif extra_ok is False:
                fail("additionalProperties", f"unexpected property {key!r}")
            elif isinstance(extra_ok, dict):
                _check(extra_ok, val, f"{path}/{_esc(key)}", errors, stop)
            if stop and errors:
                return

    elif isinstance(x, list):
        n = len(x)
        if "minItems" in s and n < s["minItems"]:
            fail("minItems", f"{n} items, minimum {s['minItems']}")
        if "maxItems" in s and n > s["maxItems"]:
            fail("maxItems", f"{n} items, maximum {s['maxItems']}")
        if s.get("uniqueItems") is True and len({canonical_json(v) for v in x}) != n:
            fail("uniqueItems", "items are not unique")
        items = s.get("items")
        if isinstance(items, list):
            for i, v in enumerate(x):
                if i < len(items):
                    _check(items[i], v, f"{path}/{i}", errors, stop)
                elif s.get("additionalItems", True) is False:
                    fail("additionalItems", f"item {i} beyond tuple length {len(items)}")
                    break
                if stop and errors:
                    return
        elif items is not None:
            for i, v in enumerate(x):
                _check(items, v, f"{path}/{i}", errors, stop)
                if stop and errors:
                    return

    elif isinstance(x, str):
        n = len(x)
        if "minLength" in s and n < s["minLength"]:
            fail("minLength", f"length {n} below {s['minLength']}")
        if "maxLength" in s and n > s["maxLength"]:
            fail("maxLength", f"length {n} above {s['maxLength']}")
        if "pattern" in s and _regex(s["pattern"]).search(x) is None:
            fail("pattern", f"does not match {s['pattern']!r}")
        if "format" in s and not matches_format(x, s["format"]):
            fail("format", f"not a valid {s['format']}")

    elif _is_number(x):
        if "minimum" in s and x < s["minimum"]:
            fail("minimum", f"{x} below {s['minimum']}")
        if "maximum" in s and x > s["maximum"]:
            fail("maximum", f"{x} above {s['maximum']}")
        if "multipleOf" in s:
            m = s["multipleOf"]
            ok = (isinstance(x, int) or x.is_integer()) and int(x) % m == 0 if isinstance(m, int) else (x / m).is_integer()
            if not ok:
                fail("multipleOf", f"{x} is not a multiple of {m}")
