"""The preference machine: prompts, backends, debiased comparison, caching."""

from .backends import (
    DEFAULT_PARALLELISM,
    GenerationBackend,
    HttpBackend,
    HttpBackendConfig,
    ReplayBackend,
    ReplayBackendConfig,
    ScoringBackend,
    SimulatedBackend,
    SimulatedBackendConfig,
    backend_from_config,
    simulated_compare,
)
from .cache import CacheEntry, GenerationCache, comparison_key, generation_key
from .comparator import ComparisonOutcome, PreferenceComparator, compare_debiased
from .parsing import Preference, parse_preference
from .templates import BUILTIN_TEMPLATES, PromptTemplate, get_template, render_prompt

__all__ = [
    "BUILTIN_TEMPLATES",
    "CacheEntry",
    "ComparisonOutcome",
    "DEFAULT_PARALLELISM",
    "GenerationBackend",
    "GenerationCache",
    "HttpBackend",
    "HttpBackendConfig",
    "Preference",
    "PreferenceComparator",
    "PromptTemplate",
    "ReplayBackend",
    "ReplayBackendConfig",
    "ScoringBackend",
    "SimulatedBackend",
    "SimulatedBackendConfig",
    "backend_from_config",
    "compare_debiased",
    "comparison_key",
    "generation_key",
    "get_template",
    "parse_preference",
    "render_prompt",
    "simulated_compare",
]
