"""Dataset ingestion: the documented directory schema plus a generic converter.

A dataset is a directory:

    dataset.json        {"name", "labels" (ordinal order), "metric",
                         "template", "aspect_based", "instruction"?}
    demos_seed<i>.jsonl one row per demonstration: {"text", "label", "aspect"?}
    test.jsonl          one row per test record, same fields

Labels are validated against the declared space; casing differences are
accepted with a case-fold (and logged) so upstream exports survive.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from ..core import Demonstration, DemonstrationSet, OrderedLabelSpace
from ..errors import ConfigError, UnknownLabelError, ValidationError
from .metrics import validate_metric_id

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DatasetRecord:
    """One test example: text, canonical gold label string, optional aspect."""

    text: str
    label: str
    aspect: str | None = None


@dataclass(frozen=True)
class LoadedDataset:
    name: str
    space: OrderedLabelSpace
    metric_id: str
    template_id: str
    aspect_based: bool
    instruction: str
    seeds: dict[str, DemonstrationSet]
    test: tuple[DatasetRecord, ...]

    def gold_indices(self) -> list[int]:
        return [self.space.index(r.label) for r in self.test]


def _canonical_label(raw: str, space: OrderedLabelSpace, where: str) -> str:
    if raw in space.labels:
        return raw
    folded = {lab.casefold(): lab for lab in space.labels}
    hit = folded.get(raw.casefold())
    if hit is not None:
        logger.info("%s: label %r accepted as %r via case-fold", where, raw, hit)
        return hit
    raise UnknownLabelError(raw, space.labels)


def _read_rows(path: Path, space: OrderedLabelSpace, aspect_based: bool):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path.name}:{lineno}"
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{where}: malformed row ({exc})") from exc
            if not isinstance(row, dict) or "text" not in row or "label" not in row:
                raise ValidationError(f"{where}: rows need 'text' and 'label' fields")
            text = row["text"]
            if not isinstance(text, str) or not text:
                raise ValidationError(f"{where}: text must be a nonempty string")
            label = _canonical_label(str(row["label"]), space, where)
            aspect = row.get("aspect")
            if aspect_based and not aspect:
                raise ValidationError(f"{where}: aspect-based dataset rows need an 'aspect' field")
            rows.append((text, label, aspect))
    return rows


def load_dataset(path: str | Path, space: OrderedLabelSpace | None = None) -> LoadedDataset:
    """Load and validate a dataset directory into per-seed demos and test records."""
    root = Path(path)
    spec_path = root / "dataset.json"
    if not spec_path.is_file():
        raise ValidationError(f"{root}: missing dataset.json")
    try:
        info = json.loads(spec_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{spec_path}: malformed JSON ({exc})") from exc
    for key in ("name", "labels", "metric"):
        if key not in info:
            raise ValidationError(f"{spec_path}: missing required field {key!r}")
    declared = OrderedLabelSpace(tuple(info["labels"]))
    if space is not None and space.labels != declared.labels:
        raise ValidationError(
            f"{spec_path}: declared labels {declared.labels} do not match the requested space {space.labels}"
        )
    space = declared
    metric_id = validate_metric_id(info["metric"], space)
    aspect_based = bool(info.get("aspect_based", False))
    template_id = info.get("template", info["name"])
    instruction = info.get("instruction", "")

    seed_paths = sorted(root.glob("demos_seed*.jsonl"))
    if not seed_paths:
        raise ValidationError(f"{root}: no demos_seed*.jsonl files found")
    seeds: dict[str, DemonstrationSet] = {}
    for seed_path in seed_paths:
        rows = _read_rows(seed_path, space, aspect_based)
        if not rows:
            raise ValidationError(f"{seed_path}: no demonstrations")
        demos = tuple(
            Demonstration(text, space.index(label), aspect) for text, label, aspect in rows
        )
        counts = {j: sum(1 for d in demos if d.label == j) for j in range(len(space))}
        balanced = len(set(counts.values())) == 1 and 0 not in counts.values()
        shots = next(iter(counts.values())) if balanced else None
        seed_id = seed_path.stem.removeprefix("demos_")
        seeds[seed_id] = DemonstrationSet(demos, space, shots)

    test_path = root / "test.jsonl"
    if not test_path.is_file():
        raise ValidationError(f"{root}: missing test.jsonl")
    test = tuple(
        DatasetRecord(text, label, aspect)
        for text, label, aspect in _read_rows(test_path, space, aspect_based)
    )
    if not test:
        raise ValidationError(f"{test_path}: no test records")

    return LoadedDataset(
        name=info["name"],
        space=space,
        metric_id=metric_id,
        template_id=template_id,
        aspect_based=aspect_based,
        instruction=instruction,
        seeds=seeds,
        test=test,
    )


def convert_rows(
    input_path: str | Path,
    fmt: str,
    text_col: str,
    label_col: str,
    aspect_col: str | None = None,
) -> list[dict]:
    """Read rows from a delimited or JSONL export into the dataset row schema."""
    input_path = Path(input_path)
    if not input_path.is_file():
        raise ConfigError(f"input file not found: {input_path}")
    rows: list[dict] = []

    def emit(record: dict, where: str):
        if text_col not in record or label_col not in record:
            raise ValidationError(f"{where}: missing column {text_col!r} or {label_col!r}")
        out = {"text": str(record[text_col]), "label": str(record[label_col])}
        if aspect_col:
            if aspect_col not in record:
                raise ValidationError(f"{where}: missing aspect column {aspect_col!r}")
            out["aspect"] = str(record[aspect_col])
        rows.append(out)

    if fmt == "jsonl":
        with open(input_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if line:
                    emit(json.loads(line), f"{input_path.name}:{lineno}")
    elif fmt in ("csv", "tsv"):
        delimiter = "," if fmt == "csv" else "\t"
        with open(input_path, encoding="utf-8", newline="") as fh:
            for lineno, record in enumerate(csv.DictReader(fh, delimiter=delimiter), start=2):
                emit(record, f"{input_path.name}:{lineno}")
    else:
        raise ConfigError(f"unknown input format {fmt!r} (expected jsonl, csv, or tsv)")
    return rows


def write_dataset_file(rows: list[dict], out_path: str | Path) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def write_dataset_spec(
    out_dir: str | Path,
    name: str,
    labels: list[str],
    metric: str,
    template: str | None = None,
    aspect_based: bool = False,
    instruction: str = "",
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec_path = out_dir / "dataset.json"
    spec_path.write_text(
        json.dumps(
            {
                "name": name,
                "labels": labels,
                "metric": metric,
                "template": template or name,
                "aspect_based": aspect_based,
                "instruction": instruction,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    return spec_path
