"""Score-to-label decision machinery: expected, self-supervised, and mixture cuts.

Scores stay exact integers; thresholds are exact rationals (midpoints and
mixtures halve integers). The self-supervised search enumerates strictly
increasing integer cut tuples inside a window around the expected thresholds
and keeps the tuple whose induced label distribution over the probing scores
has maximal entropy.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import OrderedLabelSpace
from .errors import CalibrationError, ValidationError

Rational = int | float | Fraction


@dataclass(frozen=True)
class Thresholds:
    """Strictly increasing rational cut points; cut j separates class j-1 from j."""

    cuts: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(Fraction(c) for c in self.cuts))
        if not self.cuts:
            raise ValidationError("thresholds need at least one cut")
        for lo, hi in zip(self.cuts, self.cuts[1:]):
            if lo >= hi:
                raise ValidationError(f"cuts must be strictly increasing, got {self.as_floats()}")

    def __len__(self) -> int:
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.cuts)


@dataclass
class SearchConfig:
    """Knobs for the self-supervised threshold search.

    ``window`` is the half-width around each expected cut, in score units;
    None enumerates the full attainable range. The prediction cache maps a
    candidate tuple to its per-class counts so repeated searches over the
    same probing scores skip the counting pass.
    """

    window: int | None = None
    tie_break: str = "nearest-expected"
    prediction_cache: dict[tuple[int, ...], tuple[int, ...]] | None = None

    def __post_init__(self):
        if self.window is not None and self.window < 0:
            raise ValidationError(f"window must be >= 0, got {self.window}")
        if self.tie_break != "nearest-expected":
            raise ValidationError(f"unknown tie-break rule {self.tie_break!r}")


def expected_scores(demo_labels: Iterable[int], m: int) -> list[int]:
    """Noise-free score of a hypothetical example of each class.

    A class-j example beats every lower-labeled demonstration, ties the
    equal-labeled ones, and loses to the higher-labeled ones; no model calls
    are involved.
    """
    labels = list(demo_labels)
    if not labels:
        raise CalibrationError("cannot derive expected scores from an empty demonstration set")
    if any(lab < 0 or lab >= m for lab in labels):
        raise ValidationError(f"demo label out of range for m={m}")
    scores = []
    for j in range(m):
        total = 0
        for lab in labels:
            if lab < j:
                total += lab + 1
            elif lab == j:
                total += lab
            else:
                total += lab - 1
        scores.append(total)
    return scores


def expected_thresholds(demo_labels: Iterable[int], m: int) -> Thresholds:
    """Midpoints between adjacent expected scores (the analytic prior)."""
    scores = expected_scores(demo_labels, m)
    for j in range(1, m):
        if scores[j] <= scores[j - 1]:
            raise CalibrationError(
                f"expected scores are not increasing between classes {j - 1} and {j} "
                f"({scores[j - 1]} vs {scores[j]}); the demonstration multiset is degenerate"
            )
    return Thresholds(tuple(Fraction(scores[j] + scores[j - 1], 2) for j in range(1, m)))


def label_entropy(predicted_label_indices: Sequence[int], m: int) -> float:
    """Natural-log entropy of the empirical label distribution (0·ln 0 = 0)."""
    preds = list(predicted_label_indices)
    if not preds:
        raise ValidationError("cannot compute entropy of zero predictions")
    if any(p < 0 or p >= m for p in preds):
        raise ValidationError(f"prediction index out of range for m={m}")
    counts = [0] * m
    for p in preds:
        counts[p] += 1
    return _entropy_of_counts(counts, len(preds))


def _entropy_of_counts(counts: Sequence[int], n: int) -> float:
    h = 0.0
    for c in counts:
        if c:
            p = c / n
            h -= p * math.log(p)
    return h


def decide(score: Rational, thresholds: Thresholds, space: OrderedLabelSpace | int) -> int:
    """The decision rule: the largest class whose cut the score reaches.

    Boundaries are lower-inclusive: a score exactly equal to cut j lands in
    class j, and anything below the first cut is class 0.
    """
    m = space if isinstance(space, int) else len(space)
    if len(thresholds) != m - 1:
        raise ValidationError(f"{len(thresholds)} cuts do not fit a {m}-way space")
    label = 0
    for j, cut in enumerate(thresholds.cuts, start=1):
        if score >= cut:
            label = j
        else:
            break
    return label


def mixture_thresholds(expected: Thresholds, self_supervised: Thresholds) -> Thresholds:
    """Unweighted elementwise mean of the prior and the empirical cuts."""
    if len(expected) != len(self_supervised):
        raise ValidationError(
            f"threshold length mismatch: {len(expected)} vs {len(self_supervised)}"
        )
    return Thresholds(tuple(
        (a + b) / 2 for a, b in zip(expected.cuts, self_supervised.cuts)
    ))


@dataclass(frozen=True)
class ThresholdSearchResult:
    """Audit record of one self-supervised search."""

    thresholds: Thresholds
    entropy: float
    candidates_evaluated: int
    tie_break_applied: bool
    window: int | None

    def to_dict(self) -> dict:
        return {
            "thresholds": [str(c) for c in self.thresholds.cuts],
            "thresholds_float": list(self.thresholds.as_floats()),
            "entropy": self.entropy,
            "candidates_evaluated": self.candidates_evaluated,
            "tie_break_applied": self.tie_break_applied,
            "window": self.window,
        }


def run_threshold_search(
    probing_scores: Sequence[int],
    demo_labels: Iterable[int],
    m: int,
    cfg: SearchConfig | None = None,
) -> ThresholdSearchResult:
    """Exhaustive entropy search over windowed integer cut tuples.

    Candidates per position are the integers within ``window`` of the
    corresponding expected cut, intersected with the attainable score range.
    Entropy ties break toward the tuple nearest the expected cuts (L1), then
    lexicographically smallest; the scan order makes the whole search
    deterministic.
    """
    cfg = cfg or SearchConfig()
    scores = sorted(int(s) for s in probing_scores)
    if not scores:
        raise CalibrationError(
            "empty probing set: fall back to expected thresholds or provide probing texts"
        )
    labels = list(demo_labels)
    expected = expected_thresholds(labels, m)
    lo = sum(labels) - len(labels)
    hi = sum(labels) + len(labels)
    n = len(scores)

    candidate_lists: list[list[int]] = []
    for cut in expected.cuts:
        if cfg.window is None:
            lo_j, hi_j = lo, hi
        else:
            lo_j = max(lo, math.ceil(cut - cfg.window))
            hi_j = min(hi, math.floor(cut + cfg.window))
        candidate_lists.append(list(range(lo_j, hi_j + 1)))
    if any(not c for c in candidate_lists):
        raise CalibrationError("threshold window excludes every attainable candidate")

    # Per-count entropy terms, precomputed so the inner loop avoids log calls;
    # the accumulation below mirrors label_entropy exactly (same float ops).
    term = [0.0] * (n + 1)
    for c in range(1, n + 1):
        p = c / n
        term[c] = p * math.log(p)

    def entropy_of(counts: tuple[int, ...]) -> float:
        h = 0.0
        for c in counts:
            if c:
                h -= term[c]
        return h

    best_tuple: tuple[int, ...] | None = None
    best_entropy = -1.0
    best_l1: Fraction | None = None
    evaluated = 0
    tie_break_applied = False
    positions = len(candidate_lists)
    cache = cfg.prediction_cache

    def counts_for(tup: tuple[int, ...]) -> tuple[int, ...]:
        if cache is not None:
            hit = cache.get(tup)
            if hit is not None:
                return hit
        edges = [bisect_left(scores, t) for t in tup]
        counts = [edges[0]]
        for a, b in zip(edges, edges[1:]):
            counts.append(b - a)
        counts.append(n - edges[-1])
        result = tuple(counts)
        if cache is not None:
            cache[tup] = result
        return result

    def l1_to_expected(tup: tuple[int, ...]) -> Fraction:
        return sum((abs(Fraction(t) - cut) for t, cut in zip(tup, expected.cuts)), Fraction(0))

    stack: list[int] = []

    def walk(position: int) -> None:
        nonlocal best_tuple, best_entropy, best_l1, evaluated, tie_break_applied
        if position == positions:
            tup = tuple(stack)
            evaluated += 1
            h = entropy_of(counts_for(tup))
            if h > best_entropy:
                best_tuple, best_entropy, best_l1 = tup, h, None
            elif h == best_entropy and best_tuple is not None:
                tie_break_applied = True
                if best_l1 is None:
                    best_l1 = l1_to_expected(best_tuple)
                l1 = l1_to_expected(tup)
                if l1 < best_l1 or (l1 == best_l1 and tup < best_tuple):
                    best_tuple, best_l1 = tup, l1
            return
        floor = stack[-1] + 1 if stack else None
        for t in candidate_lists[position]:
            if floor is not None and t < floor:
                continue
            stack.append(t)
            walk(position + 1)
            stack.pop()

    walk(0)

    if best_tuple is None:
        raise CalibrationError("no strictly increasing cut tuple fits the candidate windows")
    return ThresholdSearchResult(
        thresholds=Thresholds(tuple(Fraction(t) for t in best_tuple)),
        entropy=best_entropy,
        candidates_evaluated=evaluated,
        tie_break_applied=tie_break_applied,
        window=cfg.window,
    )


def search_self_supervised_thresholds(
    probing_scores: Sequence[int],
    demo_labels: Iterable[int],
    m: int,
    cfg: SearchConfig | None = None,
) -> Thresholds:
    """The entropy-maximizing integer cuts over the probing scores."""
    return run_threshold_search(probing_scores, demo_labels, m, cfg).thresholds
