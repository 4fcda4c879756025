"""Ordinal label spaces, demonstrations, and comparison-sum scoring.

A test instance is scored by comparing it against every demonstration
through a preference oracle; each comparison contributes the demonstration's
integer label value shifted by the three-valued comparison outcome, and the
instance score is the sum of those local scores.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence, runtime_checkable

from .errors import UnknownLabelError, ValidationError

_OUTCOMES = (-1, 0, 1)


@dataclass(frozen=True)
class OrderedLabelSpace:
    """An ordered tuple of label strings; position j is the label's integer value."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 2:
            raise ValidationError("a label space needs at least 2 labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"duplicate labels in space: {self.labels}")
        if not all(isinstance(lab, str) and lab for lab in self.labels):
            raise ValidationError("labels must be nonempty strings")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(label, self.labels) from None

    def label(self, index: int) -> str:
        if not 0 <= index < len(self.labels):
            raise ValidationError(f"label index {index} out of range for {len(self.labels)} labels")
        return self.labels[index]


def label_index(label: str, space: OrderedLabelSpace) -> int:
    """Map a label string to its integer value (its position in the space)."""
    return space.index(label)


@dataclass(frozen=True)
class Item:
    """A piece of text to compare or classify, with an optional aspect."""

    text: str
    aspect: str | None = None


@dataclass(frozen=True)
class Demonstration:
    """A labeled example: text, label index, optional aspect."""

    text: str
    label: int
    aspect: str | None = None

    def __post_init__(self):
        if not self.text:
            raise ValidationError("demonstration text must be nonempty")
        if self.label < 0:
            raise ValidationError(f"label index must be >= 0, got {self.label}")

    @property
    def item(self) -> Item:
        return Item(self.text, self.aspect)


@dataclass(frozen=True)
class DemonstrationSet:
    """The demonstration pool for one seed, bound to its label space.

    When ``shots_per_class`` is set, every class must contribute exactly that
    many items; arbitrary unbalanced multisets are accepted otherwise.
    """

    items: tuple[Demonstration, ...]
    label_space: OrderedLabelSpace
    shots_per_class: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValidationError("demonstration set must be nonempty")
        m = len(self.label_space)
        for demo in self.items:
            if demo.label >= m:
                raise ValidationError(
                    f"demonstration label index {demo.label} out of range for {m}-way space"
                )
        if self.shots_per_class is not None:
            counts = self.label_counts()
            bad = {j: counts.get(j, 0) for j in range(m) if counts.get(j, 0) != self.shots_per_class}
            if bad:
                raise ValidationError(
                    f"declared {self.shots_per_class} shots per class, got counts {dict(sorted(bad.items()))}"
                )

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def label_counts(self) -> Counter:
        return Counter(d.label for d in self.items)

    def label_sum(self) -> int:
        return sum(d.label for d in self.items)

    @classmethod
    def balanced(
        cls,
        space: OrderedLabelSpace,
        shots_per_class: int,
        texts_by_class: Sequence[Sequence[str]],
    ) -> "DemonstrationSet":
        """Build a balanced set from per-class text lists (convenience for fixtures)."""
        items = [
            Demonstration(text, j)
            for j, texts in enumerate(texts_by_class)
            for text in texts
        ]
        return cls(tuple(items), space, shots_per_class)


@runtime_checkable
class PreferenceOracle(Protocol):
    """Anything that can answer "is x above demo in the ordinal dimension?"."""

    def compare(self, x: Item, demo: Item) -> int:
        """Return the debiased comparison outcome: +1, 0, or -1."""
        ...


def local_score(outcome: int, demo_label_index: int) -> int:
    """One comparison's contribution: the demonstration's label value plus the outcome."""
    if outcome not in _OUTCOMES:
        raise ValidationError(f"comparison outcome must be -1, 0, or +1, got {outcome}")
    if demo_label_index < 0:
        raise ValidationError(f"label index must be >= 0, got {demo_label_index}")
    return demo_label_index + outcome


def score_instance(x: Item | str, demos: DemonstrationSet | Iterable[Demonstration], oracle: PreferenceOracle) -> int:
    """Score a test instance: the sum of local scores against every demonstration.

    The comparisons are independent, so the result does not depend on the
    iteration order of the demonstration set.
    """
    if isinstance(x, str):
        x = Item(x)
    demos = list(demos)
    if not demos:
        raise ValidationError("cannot score against an empty demonstration set")
    return sum(local_score(int(oracle.compare(x, d.item)), d.label) for d in demos)


def score_bounds(demos: DemonstrationSet | Iterable[Demonstration]) -> tuple[int, int]:
    """The attainable score range: label sum shifted down/up by the set size."""
    demos = list(demos)
    total = sum(d.label for d in demos)
    return total - len(demos), total + len(demos)
