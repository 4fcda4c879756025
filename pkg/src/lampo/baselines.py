"""Comparison methods: pointwise few-shot prediction, contextual calibration,
and entropy-based demonstration-ordering selection."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from .core import Demonstration, DemonstrationSet, Item, OrderedLabelSpace
from .errors import (
    CalibrationError,
    ContextOverflowError,
    UnparseablePredictionError,
    UnsupportedOperationError,
    ValidationError,
)
from .oracle.backends import GenerationBackend, ScoringBackend
from .oracle.cache import GenerationCache, generation_key
from .probing import ProbingSet, linearize_example
from .thresholding import label_entropy

logger = logging.getLogger(__name__)

DEFAULT_CONTENT_FREE = "N/A"


@dataclass(frozen=True)
class PromptContext:
    """An instruction plus demonstrations in one fixed order."""

    instruction: str
    demonstrations: tuple[Demonstration, ...]
    ordering_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "demonstrations", tuple(self.demonstrations))
        if not self.demonstrations:
            raise ValidationError("a few-shot context needs at least one demonstration")


def render_context(ctx: PromptContext, space: OrderedLabelSpace) -> str:
    lines = [linearize_example(d, space) for d in ctx.demonstrations]
    header = ctx.instruction + "\n\n" if ctx.instruction else ""
    return header + "\n".join(lines)


def render_pointwise_prompt(ctx: PromptContext, x: Item | str, space: OrderedLabelSpace) -> str:
    """The full pointwise prompt: context, then the test input awaiting its label."""
    text = x.text if isinstance(x, Item) else x
    return render_context(ctx, space) + f"\ninput:{text} type:"


@dataclass(frozen=True)
class ProbabilityVector:
    """Per-label probabilities over the ordered label space."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValidationError("probability vector must be nonempty")
        if any(v < 0 for v in self.values):
            raise ValidationError(f"probabilities must be nonnegative: {self.values}")
        if abs(sum(self.values) - 1.0) > 1e-9:
            raise ValidationError(f"probabilities must sum to 1, got {sum(self.values)!r}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def argmax(self) -> int:
        return max(range(len(self.values)), key=lambda j: (self.values[j], -j))

    @classmethod
    def normalize(cls, raw: list[float] | tuple[float, ...]) -> "ProbabilityVector":
        total = sum(raw)
        if total <= 0:
            raise ValidationError("cannot normalize a nonpositive vector")
        return cls(tuple(v / total for v in raw))


def _generate_cached(backend: GenerationBackend, prompt: str, cache: GenerationCache | None) -> str:
    if cache is None:
        return backend.generate(prompt)
    key = generation_key(prompt)
    entry = cache.get(key)
    if entry is not None:
        return entry.raw
    raw = backend.generate(prompt)
    cache.put(key, raw, "")
    return raw


def match_label(output: str, space: OrderedLabelSpace) -> int:
    """Longest case-insensitive label substring wins; no match is an error."""
    low = output.lower()
    best: tuple[int, int] | None = None  # (label length, -index) maximized
    for j, lab in enumerate(space.labels):
        if lab.lower() in low:
            key = (len(lab), -j)
            if best is None or key > best:
                best = key
    if best is None:
        raise UnparseablePredictionError(
            f"generation matched no label in {space.labels}: {output[:120]!r}"
        )
    return -best[1]


def icl_predict(
    ctx: PromptContext,
    x: Item | str,
    backend: GenerationBackend,
    space: OrderedLabelSpace,
    cache: GenerationCache | None = None,
) -> int:
    """Pointwise prediction: generate after the prompt and match a label string."""
    prompt = render_pointwise_prompt(ctx, x, space)
    budget = backend.max_prompt_chars
    if budget is not None and len(prompt) > budget:
        raise ContextOverflowError(
            f"pointwise prompt is {len(prompt)} chars, backend budget is {budget}"
        )
    raw = _generate_cached(backend, prompt, cache)
    return match_label(raw, space)


def contextual_calibrate(p_x: ProbabilityVector, p_cf: ProbabilityVector) -> ProbabilityVector:
    """Divide out the content-free bias componentwise, then renormalize."""
    if len(p_x) != len(p_cf):
        raise ValidationError(f"vector length mismatch: {len(p_x)} vs {len(p_cf)}")
    zeros = [j for j, v in enumerate(p_cf.values) if v <= 0.0]
    if zeros:
        raise CalibrationError(
            f"content-free probability is zero for label index(es) {zeros}; calibration is singular"
        )
    corrected = [px / pcf for px, pcf in zip(p_x.values, p_cf.values)]
    return ProbabilityVector.normalize(corrected)


def cc_predict(
    ctx: PromptContext,
    x: Item | str,
    backend,
    space: OrderedLabelSpace,
    content_free: str = DEFAULT_CONTENT_FREE,
) -> int:
    """Calibrated pointwise prediction; needs a probability-capable backend."""
    if not isinstance(backend, ScoringBackend):
        raise UnsupportedOperationError(
            "contextual calibration requires per-label probabilities, which this backend cannot provide"
        )
    prompt_x = render_pointwise_prompt(ctx, x, space)
    prompt_cf = render_pointwise_prompt(ctx, content_free, space)
    p_x = ProbabilityVector(tuple(backend.label_probabilities(prompt_x, space.labels)))
    p_cf = ProbabilityVector(tuple(backend.label_probabilities(prompt_cf, space.labels)))
    return contextual_calibrate(p_x, p_cf).argmax


def sample_orderings(n_items: int, n_candidates: int, seed: int) -> list[tuple[int, ...]]:
    """Deterministically sample distinct permutations; ordering id is list position."""
    if n_candidates < 1:
        raise ValidationError("need at least one candidate ordering")
    rng = random.Random(seed)
    seen: set[tuple[int, ...]] = set()
    orderings: list[tuple[int, ...]] = []
    attempts = 0
    while len(orderings) < n_candidates and attempts < 50 * n_candidates:
        attempts += 1
        perm = tuple(rng.sample(range(n_items), n_items))
        if perm not in seen:
            seen.add(perm)
            orderings.append(perm)
    return orderings


@dataclass(frozen=True)
class OrderingCandidate:
    """Diagnostics for one candidate ordering."""

    ordering_id: int
    entropy: float | None
    predictions: tuple[int, ...]
    unparseable: int
    overflowed: bool


@dataclass(frozen=True)
class OrderingSelection:
    context: PromptContext
    entropy: float
    candidates: tuple[OrderingCandidate, ...]


def rank_orderings(
    demos: DemonstrationSet,
    n_candidates: int,
    probing: ProbingSet,
    backend: GenerationBackend,
    space: OrderedLabelSpace,
    seed: int = 0,
    instruction: str = "",
    cache: GenerationCache | None = None,
) -> OrderingSelection:
    """Rank sampled demonstration orderings by probe-prediction entropy.

    Probe predictions are cached per (ordering, probe) through the generation
    cache, so re-ranking with more candidates reuses earlier calls. Ties break
    toward the smallest ordering id.
    """
    if len(probing) == 0:
        raise ValidationError("ordering selection needs a nonempty probing set")
    orderings = sample_orderings(len(demos), n_candidates, seed)
    cache = cache if cache is not None else GenerationCache()
    candidates: list[OrderingCandidate] = []
    best: tuple[float, int] | None = None  # (entropy, ordering id), entropy maximized
    best_ctx: PromptContext | None = None
    for ordering_id, perm in enumerate(orderings):
        ctx = PromptContext(
            instruction=instruction,
            demonstrations=tuple(demos.items[i] for i in perm),
            ordering_id=ordering_id,
        )
        predictions: list[int] = []
        unparseable = 0
        overflowed = False
        for probe in probing:
            try:
                predictions.append(icl_predict(ctx, probe, backend, space, cache))
            except ContextOverflowError:
                overflowed = True
                break
            except UnparseablePredictionError:
                unparseable += 1
        if overflowed or not predictions:
            candidates.append(OrderingCandidate(ordering_id, None, (), unparseable, overflowed))
            continue
        h = label_entropy(predictions, len(space))
        candidates.append(OrderingCandidate(ordering_id, h, tuple(predictions), unparseable, False))
        if best is None or h > best[0]:
            best = (h, ordering_id)
            best_ctx = ctx
    if best_ctx is None or best is None:
        raise ContextOverflowError(
            "every candidate ordering was infeasible for this backend's context budget"
        )
    return OrderingSelection(context=best_ctx, entropy=best[0], candidates=tuple(candidates))


def globale_select_ordering(
    demos: DemonstrationSet,
    n_candidates: int,
    probing: ProbingSet,
    backend: GenerationBackend,
    space: OrderedLabelSpace,
    seed: int = 0,
    instruction: str = "",
    cache: GenerationCache | None = None,
) -> PromptContext:
    """The ordering whose probe predictions have maximal label entropy."""
    return rank_orderings(
        demos, n_candidates, probing, backend, space,
        seed=seed, instruction=instruction, cache=cache,
    ).context
