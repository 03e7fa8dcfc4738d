"""String format detectors.

Detectors are tried in a fixed order and the first match wins:
uuid, date-time, date, time, ipv4, ipv6, email, uri. Discovery and
validation use the same functions, so a discovered ``format`` keyword is
always satisfied by the training strings.

Accepted shapes:

* ``uuid``: 8-4-4-4-12 hex digits, any case.
* ``date``: ``YYYY-MM-DD`` naming a real calendar date.
* ``time``: ``HH:MM:SS`` with optional fraction and optional ``Z`` or
  ``+HH:MM`` offset (second 60 allowed for leap seconds).
* ``date-time``: ``date`` + ``T``/``t``/space + ``time``, offset required.
* ``ipv4``: dotted quad, no leading zeros.
* ``ipv6``: anything :mod:`ipaddress` accepts as IPv6 (no zone id).
* ``email``: ``local@domain.tld`` with no whitespace and a single ``@``.
* ``uri``: RFC 3986 scheme, ``:``, then at least one non-space character.
"""

from __future__ import annotations

import datetime as _dt
import ipaddress
import re

_UUID = re.compile(r"[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}\Z")
_DATE = re.compile(r"(\d{4})-(\d{2})-(\d{2})\Z")
_TIME = re.compile(r"(\d{2}):(\d{2}):(\d{2})(\.\d+)?(Z|z|[+-]\d{2}:\d{2})?\Z")
_DATETIME = re.compile(r"(\d{4}-\d{2}-\d{2})[Tt ](.+)\Z")
_IPV4 = re.compile(r"(25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)(\.(25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)){3}\Z")
_EMAIL = re.compile(r"[^@\s]+@[^@\s.]+(\.[^@\s.]+)+\Z")
_URI = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:\S+\Z")


def is_uuid(s: str) -> bool:
    return _UUID.match(s) is not None


def is_date(s: str) -> bool:
    m = _DATE.match(s)
    if not m:
        return False
    try:
        _dt.date(int(m[1]), int(m[2]), int(m[3]))
    except ValueError:
        return False
    return True


def _time_ok(s: str, need_offset: bool) -> bool:
    m = _TIME.match(s)
    if not m:
        return False
    if need_offset and not m[5]:
        return False
    hh, mm, ss = int(m[1]), int(m[2]), int(m[3])
    if hh > 23 or mm > 59 or ss > 60:
        return False
    off = m[5]
    if off and off not in ("Z", "z"):
        oh, om = int(off[1:3]), int(off[4:6])
        if oh > 23 or om > 59:
            return False
    return True


def is_time(s: str) -> bool:
    return _time_ok(s, need_offset=False)


def is_date_time(s: str) -> bool:
    m = _DATETIME.match(s)
    return bool(m) and is_date(m[1]) and _time_ok(m[2], need_offset=True)


def is_ipv4(s: str) -> bool:
    return _IPV4.match(s) is not None


def is_ipv6(s: str) -> bool:
    if ":" not in s or "%" in s:
        return False
    try:
        ipaddress.IPv6Address(s)
    except ValueError:
        return False
    return True


def is_email(s: str) -> bool:
    return _EMAIL.match(s) is not None


def is_uri(s: str) -> bool:
    return _URI.match(s) is not None


DETECTORS = (
    ("uuid", is_uuid),
    ("date-time", is_date_time),
    ("date", is_date),
    ("time", is_time),
    ("ipv4", is_ipv4),
    ("ipv6", is_ipv6),
    ("email", is_email),
    ("uri", is_uri),
)
FORMATS = {name: fn for name, fn in DETECTORS}


def detect_format(s: str) -> str | None:
    """Name of the first matching format, or None."""
    for name, fn in DETECTORS:
        if fn(s):
            return name
    return None


def matches_format(s: str, name: str) -> bool:
    try:
        return FORMATS[name](s)
    except KeyError:
        raise ValueError(f"unsupported format {name!r}") from None
