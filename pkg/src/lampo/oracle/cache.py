"""Persistent generation cache: JSONL rows keyed by order-sensitive digests."""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..core import Item
from ..errors import ValidationError


@dataclass(frozen=True)
class CacheEntry:
    key: str
    raw: str
    parsed: str
    ts: float


def comparison_key(template_id: str, a: Item | str, b: Item | str) -> str:
    """Digest of (template, passage A, passage B); (A,B) and (B,A) are distinct.

    Aspect strings participate so equal texts with different aspects never collide.
    """
    if isinstance(a, str):
        a = Item(a)
    if isinstance(b, str):
        b = Item(b)
    blob = "\x1f".join(("cmp", template_id, a.text, a.aspect or "", b.text, b.aspect or ""))
    return hashlib.blake2b(blob.encode("utf-8", "replace"), digest_size=16).hexdigest()


def generation_key(prompt: str) -> str:
    """Digest identifying an arbitrary generation call (pointwise / probing)."""
    blob = "gen\x1f" + prompt
    return hashlib.blake2b(blob.encode("utf-8", "replace"), digest_size=16).hexdigest()


class GenerationCache:
    """Append-friendly store of raw generations, safe for concurrent readers.

    Rows are one JSON object per line: {"key", "raw", "parsed", "ts"}. Loading
    tolerates duplicate keys (last row wins), so resumed and re-run jobs can
    append to the same file.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._entries: dict[str, CacheEntry] = {}
        self.hits = 0
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                    entry = CacheEntry(row["key"], row["raw"], row["parsed"], float(row.get("ts", 0.0)))
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ValidationError(f"{self.path}:{lineno}: corrupt cache row ({exc})") from exc
                self._entries[entry.key] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def get(self, key: str) -> CacheEntry | None:
        with self._lock:
            entry = self._entries.get(key)
            if entry is not None:
                self.hits += 1
            return entry

    def put(self, key: str, raw: str, parsed: str) -> CacheEntry:
        entry = CacheEntry(key, raw, parsed, time.time())
        with self._lock:
            self._entries[key] = entry
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({
                        "key": entry.key,
                        "raw": entry.raw,
                        "parsed": entry.parsed,
                        "ts": entry.ts,
                    }, ensure_ascii=False) + "\n")
        return entry

    def entries(self) -> list[CacheEntry]:
        with self._lock:
            return list(self._entries.values())

    def merge_from(self, path: str | Path) -> int:
        """Load another cache file's rows into memory without persisting them here."""
        other = GenerationCache(path)
        with self._lock:
            fresh = {k: v for k, v in other._entries.items() if k not in self._entries}
            self._entries.update(fresh)
        return len(fresh)

    def rewrite(self, path: str | Path | None = None) -> int:
        """Compact the store to one row per key; returns the row count written."""
        target = Path(path) if path is not None else self.path
        if target is None:
            raise ValidationError("no path to rewrite the cache to")
        with self._lock:
            rows = list(self._entries.values())
            with open(target, "w", encoding="utf-8") as fh:
                for entry in rows:
                    fh.write(json.dumps({
                        "key": entry.key,
                        "raw": entry.raw,
                        "parsed": entry.parsed,
                        "ts": entry.ts,
                    }, ensure_ascii=False) + "\n")
        return len(rows)
