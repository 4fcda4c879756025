"""Turning raw generations into one of three preference verdicts."""

from __future__ import annotations

import enum


class Preference(enum.Enum):
    """Single-call verdict: which passage slot the model preferred, if any."""

    PREFERS_A = "a"
    PREFERS_B = "b"
    INCONCLUSIVE = "inconclusive"


def parse_preference(raw: str) -> Preference:
    """Classify a generation by case-insensitive token scan.

    "passage a" present and "passage b" absent means PREFERS_A (and
    symmetrically); anything else — both tokens, neither, empty text —
    is INCONCLUSIVE. Total: every string maps to exactly one verdict.
    """
    low = raw.lower()
    has_a = "passage a" in low
    has_b = "passage b" in low
    if has_a and not has_b:
        return Preference.PREFERS_A
    if has_b and not has_a:
        return Preference.PREFERS_B
    return Preference.INCONCLUSIVE
