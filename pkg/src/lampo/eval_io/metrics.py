"""Accuracy, macro-F1, and single-label F1 over integer label predictions.

A prediction of -1 means "no prediction" (an unparseable generation): it can
never match a gold label and contributes only a false negative to the gold
class.
"""

from __future__ import annotations

import re
from typing import Sequence

from ..core import OrderedLabelSpace
from ..errors import ValidationError

_F1_OF_RE = re.compile(r"^f1\((.+)\)$")


def accuracy(predictions: Sequence[int], golds: Sequence[int]) -> float:
    _check_lengths(predictions, golds)
    return sum(1 for p, g in zip(predictions, golds) if p == g) / len(golds)


def per_class_f1(predictions: Sequence[int], golds: Sequence[int], m: int) -> list[float]:
    """F1 for each class; zero-denominator classes score 0 by convention."""
    _check_lengths(predictions, golds)
    scores = []
    for j in range(m):
        tp = sum(1 for p, g in zip(predictions, golds) if p == j and g == j)
        fp = sum(1 for p, g in zip(predictions, golds) if p == j and g != j)
        fn = sum(1 for p, g in zip(predictions, golds) if p != j and g == j)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return scores


def macro_f1(predictions: Sequence[int], golds: Sequence[int], m: int) -> float:
    scores = per_class_f1(predictions, golds, m)
    return sum(scores) / m


def f1_of_label(predictions: Sequence[int], golds: Sequence[int], label_index: int, m: int) -> float:
    return per_class_f1(predictions, golds, m)[label_index]


def validate_metric_id(metric_id: str, space: OrderedLabelSpace) -> str:
    """Check a metric id against the label space and return it unchanged."""
    if metric_id in ("accuracy", "macro_f1"):
        return metric_id
    m = _F1_OF_RE.match(metric_id)
    if m:
        space.index(m.group(1))  # raises UnknownLabelError when the label is foreign
        return metric_id
    raise ValidationError(
        f"unknown metric id {metric_id!r} (expected accuracy, macro_f1, or f1(<label>))"
    )


def compute_metric(
    metric_id: str,
    predictions: Sequence[int],
    golds: Sequence[int],
    space: OrderedLabelSpace,
) -> float:
    """Evaluate one metric id over parallel prediction/gold index sequences."""
    _check_lengths(predictions, golds)
    m = len(space)
    if any(g < 0 or g >= m for g in golds):
        raise ValidationError("gold label index out of range")
    if any(p >= m for p in predictions):
        raise ValidationError("prediction index out of range")
    if metric_id == "accuracy":
        return accuracy(predictions, golds)
    if metric_id == "macro_f1":
        return macro_f1(predictions, golds, m)
    match = _F1_OF_RE.match(metric_id)
    if match:
        return f1_of_label(predictions, golds, space.index(match.group(1)), m)
    raise ValidationError(f"unknown metric id {metric_id!r}")


def _check_lengths(predictions: Sequence[int], golds: Sequence[int]) -> None:
    if len(predictions) != len(golds):
        raise ValidationError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(golds)}"
        )
    if not golds:
        raise ValidationError("cannot compute a metric over zero examples")
