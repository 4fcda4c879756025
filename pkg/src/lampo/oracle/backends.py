"""Generation backends: deterministic simulation, HTTP, and cache replay.

Every backend exposes ``generate(prompt, nonce=0) -> str`` plus a thread-safe
call counter. The simulated backend understands the three prompt shapes the
pipeline produces (pairwise comparison, pointwise label completion, probing
continuation) and answers them deterministically from latent values embedded
in the text, so the whole system runs end-to-end offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

from ..errors import ConfigError, ReplayMissError, TransportError
from .parsing import Preference

logger = logging.getLogger(__name__)

DEFAULT_PARALLELISM = 8

_LATENT_RE = re.compile(r"latent=(-?\d+(?:\.\d+)?)")
_PASSAGE_RE = re.compile(r"Passage A: (.*?)\n\nPassage B: (.*?)\n\n", re.DOTALL)
_TYPE_LINE_RE = re.compile(r" type:([^\n]*)")
_ENV_REF_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


@runtime_checkable
class GenerationBackend(Protocol):
    """Minimal generation surface shared by all backends."""

    name: str
    max_prompt_chars: int | None

    @property
    def calls(self) -> int: ...

    def generate(self, prompt: str, nonce: int = 0) -> str: ...


@runtime_checkable
class ScoringBackend(Protocol):
    """Optional capability: per-label probabilities for a pointwise prompt."""

    def label_probabilities(self, prompt: str, labels: Sequence[str]) -> list[float]: ...


class _CallCounter:
    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def bump(self) -> None:
        with self._lock:
            self._count += 1

    @property
    def value(self) -> int:
        with self._lock:
            return self._count


def _unit_hash(*parts) -> float:
    """Deterministic uniform draw in [0, 1) keyed by the given parts."""
    blob = "\x1f".join(str(p) for p in parts).encode("utf-8", "replace")
    digest = hashlib.blake2b(blob, digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


@dataclass(frozen=True)
class SimulatedBackendConfig:
    """Noisy deterministic comparison oracle over latent values.

    ``noise`` is the per-call flip probability, ``tie_margin`` the latent gap
    below which a call is inconclusive. All randomness is hashed from
    (seed, passage texts, nonce), so results are order- and thread-independent.
    ``labels`` (in ordinal order) enables pointwise answers.
    """

    noise: float = 0.0
    tie_margin: float = 0.0
    seed: int = 0
    labels: tuple[str, ...] | None = None
    probe_examples_per_call: int = 8
    max_prompt_chars: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ConfigError(f"noise must be in [0, 1], got {self.noise}")
        if self.tie_margin < 0:
            raise ConfigError(f"tie margin must be >= 0, got {self.tie_margin}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))


def simulated_compare(
    latent_a: float,
    latent_b: float,
    cfg: SimulatedBackendConfig,
    call_nonce: int = 0,
    key_a: str | None = None,
    key_b: str | None = None,
) -> Preference:
    """One simulated comparison call over two latent values.

    Within the tie margin the call is inconclusive; otherwise the larger
    latent wins, flipped with probability ``noise`` by a deterministic
    stream keyed on (seed, passage keys, nonce).
    """
    if abs(latent_a - latent_b) <= cfg.tie_margin:
        return Preference.INCONCLUSIVE
    truth = Preference.PREFERS_A if latent_a > latent_b else Preference.PREFERS_B
    if cfg.noise > 0.0:
        ka = key_a if key_a is not None else repr(latent_a)
        kb = key_b if key_b is not None else repr(latent_b)
        if _unit_hash(cfg.seed, "flip", ka, kb, call_nonce) < cfg.noise:
            truth = (
                Preference.PREFERS_B if truth is Preference.PREFERS_A else Preference.PREFERS_A
            )
    return truth


class SimulatedBackend:
    """Deterministic offline stand-in for an instruction-following model."""

    def __init__(self, cfg: SimulatedBackendConfig | None = None, **kwargs):
        self.cfg = cfg or SimulatedBackendConfig(**kwargs)
        self.name = f"simulated(seed={self.cfg.seed},noise={self.cfg.noise},margin={self.cfg.tie_margin})"
        self.max_prompt_chars = self.cfg.max_prompt_chars
        self._counter = _CallCounter()
        self._latents: dict[str, float] = {}

    @property
    def calls(self) -> int:
        return self._counter.value

    def latent_of(self, text: str) -> float:
        """Latent value of a passage: the inline ``latent=`` tag, else a stable hash in [0, 3]."""
        cached = self._latents.get(text)
        if cached is not None:
            return cached
        m = _LATENT_RE.search(text)
        value = float(m.group(1)) if m else 3.0 * _unit_hash("fallback-latent", text)
        self._latents[text] = value
        return value

    def generate(self, prompt: str, nonce: int = 0) -> str:
        self._counter.bump()
        stripped = prompt.rstrip()
        if stripped.endswith("type:"):
            return self._answer_pointwise(prompt, nonce)
        if "Output Passage A or Passage B" in prompt:
            return self._answer_comparison(prompt, nonce)
        return self._generate_probes(prompt, nonce)

    def _answer_comparison(self, prompt: str, nonce: int) -> str:
        m = _PASSAGE_RE.search(prompt)
        if not m:
            return "The two passages are tied."
        span_a, span_b = m.group(1), m.group(2)
        pref = simulated_compare(
            self.latent_of(span_a),
            self.latent_of(span_b),
            self.cfg,
            nonce,
            key_a=span_a,
            key_b=span_b,
        )
        if pref is Preference.PREFERS_A:
            return "Passage A"
        if pref is Preference.PREFERS_B:
            return "Passage B"
        return "The two passages are tied."

    def _answer_pointwise(self, prompt: str, nonce: int) -> str:
        if not self.cfg.labels:
            return "no label configured"
        last = prompt.rfind("input:")
        segment = prompt[last:] if last >= 0 else prompt
        latent = self.latent_of(segment)
        m = len(self.cfg.labels)
        j = min(max(int(round(latent)), 0), m - 1)
        if self.cfg.noise > 0.0 and _unit_hash(self.cfg.seed, "point-flip", segment, nonce) < self.cfg.noise:
            j = int(_unit_hash(self.cfg.seed, "point-pick", segment, nonce) * m)
            j = min(j, m - 1)
        return self.cfg.labels[j]

    def _generate_probes(self, prompt: str, nonce: int) -> str:
        labels = list(dict.fromkeys(lab.strip() for lab in _TYPE_LINE_RE.findall(prompt)))
        labels = [lab for lab in labels if lab] or list(self.cfg.labels or ("unknown",))
        m = len(labels)
        key = hashlib.blake2b(prompt.encode("utf-8", "replace"), digest_size=8).hexdigest()
        lines = []
        for i in range(self.cfg.probe_examples_per_call):
            u = _unit_hash(self.cfg.seed, "probe-latent", key, nonce, i) * max(m - 1, 1)
            lab = labels[min(int(_unit_hash(self.cfg.seed, "probe-label", key, nonce, i) * m), m - 1)]
            lines.append(f"input:synthetic latent={u:.3f} #{key[:6]}-{nonce}-{i} type:{lab}")
        return "\n".join(lines)

    # Optional scoring capability: a distance kernel around the latent.
    # Inputs without a latent tag (e.g. a content-free "N/A") carry no signal
    # and score uniformly.
    def label_probabilities(self, prompt: str, labels: Sequence[str]) -> list[float]:
        self._counter.bump()
        last = prompt.rfind("input:")
        segment = prompt[last:] if last >= 0 else prompt
        m = len(labels)
        if not _LATENT_RE.search(segment):
            return [1.0 / m] * m
        latent = self.latent_of(segment)
        import math

        raw = [math.exp(-2.0 * abs(latent - j)) for j in range(m)]
        total = sum(raw)
        return [r / total for r in raw]


@dataclass(frozen=True)
class HttpBackendConfig:
    """One POST per generation against a provider-agnostic JSON endpoint.

    ``body_template`` is a JSON document containing the literal ``{prompt}``
    placeholder; keep decoding deterministic (temperature 0) in it.
    ``extract_path`` walks the response document with dot-separated keys and
    list indices. Header values may reference environment variables as
    ``${NAME}``.
    """

    url: str
    headers: dict[str, str] = field(default_factory=dict)
    body_template: str = '{"prompt": "{prompt}", "temperature": 0, "max_tokens": 64}'
    extract_path: str = "text"
    timeout: float = 30.0
    max_retries: int = 3
    rate_limit: float | None = None
    max_parallel: int = DEFAULT_PARALLELISM
    max_prompt_chars: int | None = None

    def __post_init__(self):
        if "{prompt}" not in self.body_template:
            raise ConfigError("body_template must contain the {prompt} placeholder")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise ConfigError("rate_limit must be positive requests/sec")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be >= 1")


def _expand_env(value: str) -> str:
    def sub(m: re.Match) -> str:
        name = m.group(1)
        if name not in os.environ:
            raise ConfigError(f"header references unset environment variable {name}")
        return os.environ[name]

    return _ENV_REF_RE.sub(sub, value)


def _walk_path(document, path: str):
    node = document
    for part in path.split("."):
        if isinstance(node, list):
            try:
                node = node[int(part)]
            except (ValueError, IndexError) as exc:
                raise TransportError(f"extraction path {path!r} failed at segment {part!r}") from exc
        elif isinstance(node, dict):
            if part not in node:
                raise TransportError(f"extraction path {path!r} failed at segment {part!r}")
            node = node[part]
        else:
            raise TransportError(f"extraction path {path!r} hit a leaf at segment {part!r}")
    if not isinstance(node, str):
        raise TransportError(f"extraction path {path!r} did not yield a string (got {type(node).__name__})")
    return node


class HttpBackend:
    """Rate-limited, retrying HTTP generation client with bounded parallelism."""

    def __init__(self, cfg: HttpBackendConfig):
        self.cfg = cfg
        self.name = f"http({cfg.url})"
        self.max_prompt_chars = cfg.max_prompt_chars
        self._counter = _CallCounter()
        self._inflight = threading.Semaphore(cfg.max_parallel)
        self._rate_lock = threading.Lock()
        self._next_slot = 0.0

    @property
    def calls(self) -> int:
        return self._counter.value

    def _respect_rate_limit(self) -> None:
        if self.cfg.rate_limit is None:
            return
        interval = 1.0 / self.cfg.rate_limit
        with self._rate_lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + interval
        if wait > 0:
            time.sleep(wait)

    def generate(self, prompt: str, nonce: int = 0) -> str:
        import requests

        self._counter.bump()
        body = self.cfg.body_template.replace("{prompt}", json.dumps(prompt)[1:-1])
        headers = {k: _expand_env(v) for k, v in self.cfg.headers.items()}
        last_error: Exception | None = None
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                delay = min(0.5 * 2 ** (attempt - 1), 8.0)
                logger.warning("retrying backend call in %.1fs (attempt %d)", delay, attempt + 1)
                time.sleep(delay)
            self._respect_rate_limit()
            with self._inflight:
                try:
                    response = requests.post(
                        self.cfg.url,
                        data=body.encode("utf-8"),
                        headers={"Content-Type": "application/json", **headers},
                        timeout=self.cfg.timeout,
                    )
                except requests.RequestException as exc:
                    last_error = TransportError(f"transport failure: {exc}")
                    continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = TransportError(
                    f"backend returned {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code >= 400:
                raise TransportError(
                    f"backend rejected the request ({response.status_code}): {response.text[:200]}"
                )
            try:
                document = response.json()
            except ValueError as exc:
                raise TransportError(f"backend returned non-JSON body: {exc}") from exc
            return _walk_path(document, self.cfg.extract_path)
        raise last_error if last_error else TransportError("backend call failed")


@dataclass(frozen=True)
class ReplayBackendConfig:
    """Serve a finished run from its comparison cache; never call a model."""

    cache_path: str
    strict: bool = True


class ReplayBackend:
    """Backend that refuses to generate: replay runs must be cache-complete.

    Strict mode raises on any miss; non-strict returns an empty generation,
    which parses as inconclusive (and is logged).
    """

    def __init__(self, cfg: ReplayBackendConfig):
        self.cfg = cfg
        self.name = f"replay({cfg.cache_path})"
        self.max_prompt_chars = None
        self._counter = _CallCounter()

    @property
    def calls(self) -> int:
        return self._counter.value

    def generate(self, prompt: str, nonce: int = 0) -> str:
        self._counter.bump()
        digest = hashlib.blake2b(prompt.encode("utf-8", "replace"), digest_size=16).hexdigest()
        if self.cfg.strict:
            raise ReplayMissError(
                f"replay cache {self.cfg.cache_path} has no entry for prompt {digest}"
            )
        logger.warning("replay miss for prompt %s; returning empty generation", digest)
        return ""


def backend_from_config(config: dict) -> GenerationBackend:
    """Build a backend from a plain config mapping (the job-file representation)."""
    if not isinstance(config, dict) or "kind" not in config:
        raise ConfigError("backend config must be a mapping with a 'kind' field")
    kind = config["kind"]
    options = {k: v for k, v in config.items() if k != "kind"}
    try:
        if kind == "simulated":
            if "labels" in options and options["labels"] is not None:
                options["labels"] = tuple(options["labels"])
            return SimulatedBackend(SimulatedBackendConfig(**options))
        if kind == "http":
            return HttpBackend(HttpBackendConfig(**options))
        if kind == "replay":
            return ReplayBackend(ReplayBackendConfig(**options))
    except TypeError as exc:
        raise ConfigError(f"bad {kind} backend config: {exc}") from exc
    raise ConfigError(f"unknown backend kind {kind!r} (expected http, simulated, or replay)")
