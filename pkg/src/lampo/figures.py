"""Matplotlib renderings saved next to run reports.

Everything draws through the Agg backend so headless runs work; callers pass
output paths and get them back for the report manifest.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .thresholding import Thresholds

_FIG_SIZE = (6.4, 4.0)


def save_score_histogram(
    scores: Sequence[int],
    thresholds: Thresholds | None,
    path: str | Path,
    title: str = "score distribution",
) -> Path:
    """Histogram of instance scores with the decision cuts overlaid."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    lo, hi = min(scores), max(scores)
    bins = range(lo, hi + 2)
    ax.hist(list(scores), bins=bins, align="left", color="#4878a8", edgecolor="white")
    if thresholds is not None:
        for cut in thresholds.as_floats():
            ax.axvline(cut, color="#b0413e", linestyle="--", linewidth=1.2)
    ax.set_xlabel("score")
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_seed_metric_bars(
    seed_values: dict[str, float],
    metric_id: str,
    path: str | Path,
    title: str = "per-seed results",
) -> Path:
    """Bar chart of metric values per seed."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    names = list(seed_values)
    values = [seed_values[n] for n in names]
    ax.bar(names, values, color="#4878a8")
    ax.set_ylabel(metric_id)
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, f"{v:.3f}", ha="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_sweep_curves(
    rows: list[dict],
    path: str | Path,
    title: str = "accuracy vs comparison noise",
) -> Path:
    """Accuracy-vs-noise curves, one line per (m, k, strategy) cell family."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    families: dict[tuple, list[tuple[float, float]]] = {}
    for row in rows:
        key = (row["m"], row["k"], row["strategy"])
        families.setdefault(key, []).append((row["noise"], row["mean_accuracy"]))
    for (m, k, strategy), points in sorted(families.items()):
        points.sort()
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            marker="o",
            label=f"m={m}, k={k}, {strategy}",
        )
    ax.set_xlabel("flip probability")
    ax.set_ylabel("mean accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
