"""Promise tags carried by gap problem instances through every reduction."""

from __future__ import annotations

YES = "YES"
NO = "NO"
UNKNOWN = "UNKNOWN"

VALID = (YES, NO, UNKNOWN)


def check_promise(tag: str) -> str:
    if tag not in VALID:
        raise ValueError(f"promise must be one of {VALID}, got {tag!r}")
    return tag
