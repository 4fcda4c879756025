"""Order-debiased pairwise comparison: two swapped calls folded into one outcome."""

from __future__ import annotations

import enum
import hashlib
import logging

from ..core import Item
from ..errors import ComparisonUnavailableError, TransportError
from .backends import GenerationBackend
from .cache import GenerationCache, comparison_key
from .parsing import Preference, parse_preference
from .templates import PromptTemplate, render_prompt

logger = logging.getLogger(__name__)


class ComparisonOutcome(enum.IntEnum):
    """Debiased three-valued result: +1 the test item, -1 the demonstration, 0 a tie."""

    WIN = 1
    TIE = 0
    LOSS = -1


def _fold(first: Preference, second: Preference) -> ComparisonOutcome:
    """Fold the two swapped verdicts; disagreement or inconclusiveness is a tie."""
    if first is Preference.PREFERS_A and second is Preference.PREFERS_B:
        return ComparisonOutcome.WIN
    if first is Preference.PREFERS_B and second is Preference.PREFERS_A:
        return ComparisonOutcome.LOSS
    return ComparisonOutcome.TIE


def _prompt_digest(prompt: str) -> str:
    return hashlib.blake2b(prompt.encode("utf-8", "replace"), digest_size=16).hexdigest()


class PreferenceComparator:
    """The preference-oracle handle: template + backend + cache.

    ``compare(x, demo)`` issues the two swapped calls (served from cache when
    possible) and returns the folded outcome. Inconclusive parses become ties
    by contract; transport failures never do.
    """

    def __init__(
        self,
        template: PromptTemplate,
        backend: GenerationBackend,
        cache: GenerationCache | None = None,
    ):
        self.template = template
        self.backend = backend
        self.cache = cache if cache is not None else GenerationCache()

    @property
    def calls(self) -> int:
        return self.backend.calls

    @property
    def cache_hits(self) -> int:
        return self.cache.hits

    def _call(self, a: Item, b: Item) -> Preference:
        key = comparison_key(self.template.name, a, b)
        entry = self.cache.get(key)
        if entry is not None:
            return parse_preference(entry.raw)
        prompt = render_prompt(self.template, a, b)
        raw = self.backend.generate(prompt)
        pref = parse_preference(raw)
        self.cache.put(key, raw, pref.value)
        return pref

    def compare(self, x: Item | str, demo: Item | str) -> ComparisonOutcome:
        if isinstance(x, str):
            x = Item(x)
        if isinstance(demo, str):
            demo = Item(demo)
        try:
            first = self._call(x, demo)
            second = self._call(demo, x)
        except TransportError as exc:
            digests = (
                _prompt_digest(render_prompt(self.template, x, demo)),
                _prompt_digest(render_prompt(self.template, demo, x)),
            )
            raise ComparisonUnavailableError(str(exc), digests) from exc
        return _fold(first, second)


def compare_debiased(
    x: Item | str,
    demo: Item | str,
    backend: GenerationBackend,
    template: PromptTemplate,
    cache: GenerationCache | None = None,
) -> ComparisonOutcome:
    """Functional form of the swap protocol (builds a throwaway comparator)."""
    return PreferenceComparator(template, backend, cache).compare(x, demo)
