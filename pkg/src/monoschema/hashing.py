"""Value canonicalization and the 128-bit hash shared by the sketches.

Every sketch hashes the canonical byte form of a value with BLAKE2b
(16-byte digest) and splits the digest into two little-endian 64-bit
halves. Bloom filters use both halves for double hashing; HyperLogLog
uses the first half only. The scheme is fixed so that serialized
sketches stay compatible across runs.
"""

from __future__ import annotations

import hashlib
import json
import math

_MASK64 = 0xFFFFFFFFFFFFFFFF


def number_text(x) -> str:
    """Shortest round-trip decimal text; integral floats print as integers."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return str(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {x!r}")
    if x.is_integer() and abs(x) < 2**63:
        return str(int(x))
    return repr(x)


def value_bytes(value) -> bytes:
    if isinstance(value, str):
        return value.encode("utf-8")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return number_text(value).encode("ascii")
    return canonical_json(value).encode("utf-8")


def hash128(value) -> tuple[int, int]:
    digest = hashlib.blake2b(value_bytes(value), digest_size=16).digest()
    return (
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:], "little"),
    )


def _normalize(value):
    if isinstance(value, float) and value.is_integer() and abs(value) < 2**63:
        return int(value)
    if isinstance(value, list):
        return [_normalize(v) for v in value]
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in value.items()}
    return value


def canonical_json(value) -> str:
    """Compact JSON with sorted keys; 1 and 1.0 encode identically."""
    return json.dumps(_normalize(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
