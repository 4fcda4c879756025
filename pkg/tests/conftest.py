"""Shared fixtures: latent-tagged synthetic tasks and offline comparators."""

from __future__ import annotations

import json

import pytest

from lampo import (
    Demonstration,
    DemonstrationSet,
    OrderedLabelSpace,
    PreferenceComparator,
    SimulatedBackend,
    SimulatedBackendConfig,
    get_template,
)


@pytest.fixture
def three_way_space():
    return OrderedLabelSpace(("negative", "neutral", "positive"))


def make_space(m: int) -> OrderedLabelSpace:
    return OrderedLabelSpace(tuple(f"level{j}" for j in range(m)))


def balanced_demos(space: OrderedLabelSpace, k: int, tag: str = "d") -> DemonstrationSet:
    """k demonstrations per class, latent exactly the class index."""
    items = tuple(
        Demonstration(f"{tag} latent={j} #{tag}{j}.{i}", j)
        for j in range(len(space))
        for i in range(k)
    )
    return DemonstrationSet(items, space, shots_per_class=k)


def sim_comparator(noise: float = 0.0, tie_margin: float = 0.0, seed: int = 0,
                   template: str = "twitter") -> PreferenceComparator:
    backend = SimulatedBackend(SimulatedBackendConfig(noise=noise, tie_margin=tie_margin, seed=seed))
    return PreferenceComparator(get_template(template), backend)


def write_dataset(
    tmp_path,
    name: str = "synth",
    labels=("negative", "neutral", "positive"),
    metric: str = "accuracy",
    template: str = "twitter",
    seeds: dict | None = None,
    test_rows: list | None = None,
    aspect_based: bool = False,
    instruction: str = "",
):
    """Materialize a dataset directory; rows are (text, label[, aspect]) tuples."""
    root = tmp_path / name
    root.mkdir(parents=True, exist_ok=True)
    (root / "dataset.json").write_text(json.dumps({
        "name": name,
        "labels": list(labels),
        "metric": metric,
        "template": template,
        "aspect_based": aspect_based,
        "instruction": instruction,
    }), encoding="utf-8")

    def dump(path, rows):
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                record = {"text": row[0], "label": row[1]}
                if len(row) > 2 and row[2] is not None:
                    record["aspect"] = row[2]
                fh.write(json.dumps(record) + "\n")

    seeds = seeds or {}
    for seed_id, rows in seeds.items():
        dump(root / f"demos_{seed_id}.jsonl", rows)
    dump(root / "test.jsonl", test_rows or [])
    return root


def latent_dataset_rows(space, k: int, tag: str):
    """Balanced latent-tagged demo rows for write_dataset."""
    return [
        (f"{tag} latent={j} #{tag}{j}.{i}", space.labels[j])
        for j in range(len(space))
        for i in range(k)
    ]
