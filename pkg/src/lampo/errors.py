"""Exception hierarchy shared by every module, with CLI exit codes attached."""

from __future__ import annotations

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_TRANSPORT = 3
EXIT_VALIDATION = 4


class LampoError(Exception):
    """Base class for all package errors."""

    exit_code = EXIT_FAILURE


class ConfigError(LampoError):
    """Bad job manifest, config file, or unknown identifier."""

    exit_code = EXIT_CONFIG


class ValidationError(LampoError):
    """Domain invariant or data-schema violation."""

    exit_code = EXIT_VALIDATION


class TransportError(LampoError):
    """Backend unreachable or exhausted its retries."""

    exit_code = EXIT_TRANSPORT


class UnknownLabelError(ValidationError):
    """A label string not present in the ordered label space."""

    def __init__(self, label: str, known: tuple[str, ...] = ()):
        self.label = label
        self.known = known
        detail = f" (known labels: {', '.join(known)})" if known else ""
        super().__init__(f"unknown label {label!r}{detail}")


class CalibrationError(ValidationError):
    """Threshold derivation failed (degenerate set, empty probing, singular vector)."""


class ComparisonUnavailableError(TransportError):
    """A comparison could not be completed after all retries.

    Carries the digests of both swapped prompts so a resumed run can locate
    the outstanding cache entries.
    """

    def __init__(self, message: str, prompt_digests: tuple[str, str]):
        self.prompt_digests = prompt_digests
        super().__init__(f"{message} [prompt digests: {prompt_digests[0]}, {prompt_digests[1]}]")


class ContextOverflowError(LampoError):
    """A pointwise prompt exceeds the backend's context budget ("NA" condition)."""

    kind = "context-overflow"


class UnsupportedOperationError(LampoError):
    """The backend lacks a required capability (e.g. label probabilities for CC)."""

    kind = "unsupported"


class UnparseablePredictionError(LampoError):
    """A pointwise generation matched no label string."""


class ProbingConstructionError(ValidationError):
    """Probing-set generation yielded nothing usable."""


class ReplayMissError(TransportError):
    """A strict replay backend was asked for an unrecorded generation."""
