"""Probing-set construction: label-free texts sampled from the model itself.

Demonstrations are linearized to ``input:<text> type:<label>`` lines, their
permutations are fed to the generation backend as continuation prompts, and
``input:``-prefixed examples are extracted from the continuations. The labels
the model invents are stripped: probes carry no label field at all.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import Demonstration, DemonstrationSet, OrderedLabelSpace
from .errors import ProbingConstructionError, ValidationError
from .oracle.backends import GenerationBackend

logger = logging.getLogger(__name__)

DEFAULT_PROBE_TARGET = 50
DEFAULT_ORDERINGS = 10


@dataclass(frozen=True)
class ProbingSet:
    """Unlabeled probe texts plus provenance metadata."""

    texts: tuple[str, ...]
    provenance: str = "generated"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(self.texts))
        if not self.texts:
            raise ValidationError("probing set must be nonempty")

    def __len__(self) -> int:
        return len(self.texts)

    def __iter__(self):
        return iter(self.texts)


def linearize_example(demo: Demonstration, space: OrderedLabelSpace) -> str:
    """Standard-format sentence for one demonstration: input:<text> type:<label>."""
    return f"input:{demo.text} type:{space.label(demo.label)}"


def extract_probe_examples(generated: str) -> list[tuple[str, str]]:
    """Pull (text, label) pairs back out of a generated continuation.

    The continuation is split on ``input:`` markers; within each segment the
    text runs up to the first `` type:`` and the label is the remainder of
    that line. Segments lacking `` type:`` are discarded.
    """
    pairs: list[tuple[str, str]] = []
    segments = generated.split("input:")
    for segment in segments[1:]:
        idx = segment.find(" type:")
        if idx < 0:
            continue
        text = segment[:idx]
        label = segment[idx + len(" type:"):].split("\n", 1)[0].strip()
        pairs.append((text, label))
    return pairs


def construct_probing_set(
    demos: DemonstrationSet,
    gen_backend: GenerationBackend,
    n_target: int = DEFAULT_PROBE_TARGET,
    n_orderings: int = DEFAULT_ORDERINGS,
    seed: int = 0,
) -> ProbingSet:
    """Sample permuted-demonstration continuations until n_target probes accumulate.

    Exact duplicate texts are kept (they reflect the sampled distribution);
    empty texts are not scoreable and are dropped.
    """
    if n_target <= 0:
        raise ValidationError(f"n_target must be positive, got {n_target}")
    if n_orderings <= 0:
        raise ValidationError(f"n_orderings must be positive, got {n_orderings}")
    rng = random.Random(seed)
    lines = [linearize_example(d, demos.label_space) for d in demos]
    texts: list[str] = []
    orderings_used = 0
    for ordering_index in range(n_orderings):
        order = list(range(len(lines)))
        rng.shuffle(order)
        prompt = "\n".join(lines[i] for i in order) + "\n"
        generated = gen_backend.generate(prompt, nonce=ordering_index)
        orderings_used += 1
        for text, _label in extract_probe_examples(generated):
            if not text:
                continue
            texts.append(text)
            if len(texts) >= n_target:
                break
        if len(texts) >= n_target:
            break
    if not texts:
        raise ProbingConstructionError(
            "no probing examples could be extracted from the generated continuations; "
            "consider loading a probing set from file instead"
        )
    if len(texts) < n_target:
        logger.warning(
            "probing construction exhausted %d orderings with %d/%d probes",
            orderings_used, len(texts), n_target,
        )
    return ProbingSet(
        tuple(texts),
        provenance="generated",
        meta={
            "orderings_sampled": orderings_used,
            "backend": gen_backend.name,
            "seed": seed,
            "n_target": n_target,
        },
    )


def save_probing_set(probing: ProbingSet, path: str | Path) -> None:
    """One text per line, with a metadata sidecar next to it."""
    path = Path(path)
    for text in probing.texts:
        if "\n" in text:
            raise ValidationError("probe texts must be single-line to round-trip through the file format")
    path.write_text("".join(t + "\n" for t in probing.texts), encoding="utf-8")
    sidecar = path.with_suffix(path.suffix + ".meta.json")
    sidecar.write_text(
        json.dumps({"provenance": probing.provenance, **probing.meta}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_probing_set(path: str | Path) -> ProbingSet:
    """Load a one-text-per-line probing file; blank lines are dropped."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"probing file not found: {path}")
    texts = [line for line in path.read_text(encoding="utf-8").split("\n") if line]
    if not texts:
        raise ValidationError(f"probing file is empty: {path}")
    meta: dict = {}
    sidecar = path.with_suffix(path.suffix + ".meta.json")
    if sidecar.is_file():
        try:
            meta = json.loads(sidecar.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            logger.warning("ignoring unreadable probing metadata sidecar %s", sidecar)
    meta.pop("provenance", None)
    return ProbingSet(tuple(texts), provenance="file", meta=meta)
