"""Deterministic serialization primitives.

Everything that leaves the process — log records, API responses, CLI
canonical output — goes through ``canonical_dumps`` so that equal states
always produce equal bytes: keys sorted, no insignificant whitespace,
UTF-8, timestamps in a single fixed UTC format.
"""

import hashlib
import json
from datetime import date, datetime, timezone

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


def canonical_dumps(obj) -> str:
    return json.dumps(
        obj,
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
        allow_nan=False,
    )


def content_hash(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def now_utc() -> datetime:
    return datetime.now(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        raise ValueError("timestamps must be timezone-aware")
    return dt.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    """Strict parser for the canonical format; used when replaying logs."""
    return datetime.strptime(text, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)


def parse_timestamp_lenient(text: str) -> datetime:
    """Accepts the canonical format, ISO-8601 with offset or 'Z', or a bare date.

    Manifests are written by hand, so dates there come in looser shapes than
    the log format allows.
    """
    text = text.strip()
    try:
        return parse_timestamp(text)
    except ValueError:
        pass
    candidate = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        parsed = datetime.fromisoformat(candidate)
    except ValueError:
        try:
            d = date.fromisoformat(text)
        except ValueError:
            raise ValueError(f"unrecognized timestamp: {text!r}") from None
        return datetime(d.year, d.month, d.day, tzinfo=timezone.utc)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def epoch_micros(dt: datetime) -> int:
    """Exact integer sort key for timestamps (float epochs lose precision)."""
    delta = dt.astimezone(timezone.utc) - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return (delta.days * 86_400 + delta.seconds) * 1_000_000 + delta.microseconds
