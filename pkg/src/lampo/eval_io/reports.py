"""Run reports: per-seed metric rows aggregated into mean/std tables.

The machine-readable report is deterministic (sorted keys, no timestamps) so
identical manifests with identical caches produce byte-identical files. Seed
dispersion uses the population standard deviation: the configured seeds are
the whole population, not a sample.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class SeedResult:
    """Outcome of one seed: a metric value, or an NA kind when infeasible."""

    seed_id: str
    value: float | None = None
    na_kind: str | None = None
    calls: int = 0
    cache_hits: int = 0
    extra: dict = field(default_factory=dict)

    def cell(self) -> str:
        if self.value is None:
            return f"NA({self.na_kind or 'unknown'})"
        return f"{self.value:.4f}"


@dataclass
class MetricReport:
    """One table row: a (dataset, metric, method, config) cell across seeds."""

    dataset: str
    metric_id: str
    method: str
    config: str
    seeds: list[SeedResult]

    def values(self) -> list[float]:
        return [s.value for s in self.seeds if s.value is not None]

    def mean(self) -> float | None:
        vals = self.values()
        return sum(vals) / len(vals) if vals else None

    def std(self) -> float | None:
        vals = self.values()
        if not vals:
            return None
        mu = sum(vals) / len(vals)
        return math.sqrt(sum((v - mu) ** 2 for v in vals) / len(vals))

    def na_kinds(self) -> list[str]:
        return sorted({s.na_kind for s in self.seeds if s.na_kind})

    def summary_cell(self) -> str:
        mu = self.mean()
        if mu is None:
            kinds = self.na_kinds()
            return f"NA({kinds[0]})" if kinds else "NA(unknown)"
        return f"{mu:.4f}_{{{self.std():.4f}}}"

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "metric": self.metric_id,
            "method": self.method,
            "config": self.config,
            "seeds": [
                {
                    "seed": s.seed_id,
                    "value": s.value,
                    "na_kind": s.na_kind,
                    "calls": s.calls,
                    "cache_hits": s.cache_hits,
                    "extra": s.extra,
                }
                for s in self.seeds
            ],
            "mean": self.mean(),
            "std": self.std(),
            "std_convention": "population",
        }

    @classmethod
    def from_dict(cls, row: dict) -> "MetricReport":
        return cls(
            dataset=row["dataset"],
            metric_id=row["metric"],
            method=row["method"],
            config=row["config"],
            seeds=[
                SeedResult(
                    seed_id=s["seed"],
                    value=s["value"],
                    na_kind=s.get("na_kind"),
                    calls=s.get("calls", 0),
                    cache_hits=s.get("cache_hits", 0),
                    extra=s.get("extra", {}),
                )
                for s in row["seeds"]
            ],
        )


def render_table(reports: list[MetricReport]) -> str:
    """Human-readable table with mean_{std} summary cells."""
    headers = ["dataset", "metric", "method", "config", "result"]
    rows = [
        [r.dataset, r.metric_id, r.method, r.config, r.summary_cell()]
        for r in reports
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def emit_report(reports: list[MetricReport], out_dir: str | Path, stem: str = "report") -> dict[str, Path]:
    """Write the machine-readable JSON, the delimited TSV, and the human table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    json_path = out_dir / f"{stem}.json"
    payload = {"rows": [r.to_dict() for r in reports]}
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    tsv_path = out_dir / f"{stem}.tsv"
    with open(tsv_path, "w", encoding="utf-8") as fh:
        seed_ids = sorted({s.seed_id for r in reports for s in r.seeds})
        fh.write("\t".join(["dataset", "metric", "method", "config", *seed_ids, "mean", "std"]) + "\n")
        for r in reports:
            by_seed = {s.seed_id: s for s in r.seeds}
            cells = [by_seed[sid].cell() if sid in by_seed else "" for sid in seed_ids]
            mu, sd = r.mean(), r.std()
            fh.write("\t".join([
                r.dataset, r.metric_id, r.method, r.config,
                *cells,
                f"{mu:.6f}" if mu is not None else r.summary_cell(),
                f"{sd:.6f}" if sd is not None else "",
            ]) + "\n")

    table_path = out_dir / f"{stem}.txt"
    table_path.write_text(render_table(reports), encoding="utf-8")
    return {"json": json_path, "tsv": tsv_path, "table": table_path}


def load_report(path: str | Path) -> list[MetricReport]:
    """Reload the machine-readable report into report rows."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [MetricReport.from_dict(row) for row in payload["rows"]]
