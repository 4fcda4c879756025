"""Dataset loading, metric computation, and report round-trips."""

from __future__ import annotations

import json
import math
import random

import pytest

from lampo import MetricReport, SeedResult, compute_metric, emit_report, load_dataset, load_report
from lampo.core import OrderedLabelSpace
from lampo.errors import UnknownLabelError, ValidationError
from lampo.eval_io.datasets import convert_rows, write_dataset_file
from lampo.eval_io.metrics import validate_metric_id
from lampo.eval_io.reports import render_table

from conftest import write_dataset


# ---------------------------------------------------------------------------
# Independent confusion-matrix oracle.

def confusion_matrix(preds, golds, m):
    grid = [[0] * m for _ in range(m + 1)]  # row m collects "no prediction"
    for p, g in zip(preds, golds):
        grid[p if p >= 0 else m][g] += 1
    return grid


def oracle_metrics(preds, golds, m):
    grid = confusion_matrix(preds, golds, m)
    acc = sum(grid[j][j] for j in range(m)) / len(golds)
    f1s = []
    for j in range(m):
        tp = grid[j][j]
        fp = sum(grid[j][g] for g in range(m)) - tp
        fn = sum(grid[p][j] for p in range(m + 1)) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    return acc, sum(f1s) / m, f1s


# ---------------------------------------------------------------------------

class TestMetrics:
    def test_perfect_predictor(self, three_way_space):
        golds = [0, 1, 2, 1, 0]
        assert compute_metric("accuracy", golds, golds, three_way_space) == 1.0
        assert compute_metric("macro_f1", golds, golds, three_way_space) == 1.0

    def test_binary_f1_fixture(self):
        space = OrderedLabelSpace(("non_irony", "irony"))
        golds = [1, 1, 0, 0]
        preds = [1, 0, 0, 0]
        assert compute_metric("f1(irony)", preds, golds, space) == pytest.approx(2 / 3, abs=1e-12)

    def test_ten_example_fixture_matches_confusion_oracle(self, three_way_space):
        golds = [0, 0, 0, 1, 1, 1, 2, 2, 2, 2]
        preds = [0, 1, 0, 1, 1, 2, 2, 2, 0, 2]
        acc, mf1, f1s = oracle_metrics(preds, golds, 3)
        assert compute_metric("accuracy", preds, golds, three_way_space) == pytest.approx(acc, abs=1e-12)
        assert compute_metric("macro_f1", preds, golds, three_way_space) == pytest.approx(mf1, abs=1e-12)
        assert compute_metric("f1(neutral)", preds, golds, three_way_space) == pytest.approx(f1s[1], abs=1e-12)

    def test_no_prediction_sentinel_counts_as_miss(self, three_way_space):
        golds = [0, 1, 2]
        preds = [0, -1, 2]
        acc, mf1, _ = oracle_metrics(preds, golds, 3)
        assert compute_metric("accuracy", preds, golds, three_way_space) == pytest.approx(acc, abs=1e-12)
        assert compute_metric("macro_f1", preds, golds, three_way_space) == pytest.approx(mf1, abs=1e-12)

    def test_absent_class_contributes_zero(self, three_way_space):
        golds = [0, 0, 2, 2]
        preds = [0, 0, 2, 2]
        # Class 1 absent from both: F1 contribution 0, macro over all m classes.
        assert compute_metric("macro_f1", preds, golds, three_way_space) == pytest.approx(2 / 3, abs=1e-12)

    def test_permutation_equivariance(self, three_way_space):
        rng = random.Random(10)
        golds = [rng.randrange(3) for _ in range(30)]
        preds = [rng.randrange(3) for _ in range(30)]
        base = {
            mid: compute_metric(mid, preds, golds, three_way_space)
            for mid in ("accuracy", "macro_f1", "f1(positive)")
        }
        order = list(range(30))
        for _ in range(5):
            rng.shuffle(order)
            sp = [preds[i] for i in order]
            sg = [golds[i] for i in order]
            for mid, value in base.items():
                assert compute_metric(mid, sp, sg, three_way_space) == pytest.approx(value, abs=1e-15)

    def test_bounds(self, three_way_space):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randrange(1, 25)
            golds = [rng.randrange(3) for _ in range(n)]
            preds = [rng.randrange(3) for _ in range(n)]
            assert 0.0 <= compute_metric("accuracy", preds, golds, three_way_space) <= 1.0
            assert 0.0 <= compute_metric("macro_f1", preds, golds, three_way_space) <= 1.0

    def test_length_mismatch(self, three_way_space):
        with pytest.raises(ValidationError):
            compute_metric("accuracy", [0], [0, 1], three_way_space)

    def test_metric_id_validation(self, three_way_space):
        assert validate_metric_id("f1(positive)", three_way_space) == "f1(positive)"
        with pytest.raises(UnknownLabelError):
            validate_metric_id("f1(bogus)", three_way_space)
        with pytest.raises(ValidationError):
            validate_metric_id("rmse", three_way_space)


class TestReports:
    def test_mean_and_population_std(self):
        report = MetricReport("d", "accuracy", "lampo", "expected", [
            SeedResult("seed0", 0.65),
            SeedResult("seed1", 0.66),
            SeedResult("seed2", 0.64),
        ])
        assert report.mean() == pytest.approx(0.65, abs=1e-12)
        assert report.std() == pytest.approx(math.sqrt(0.0002 / 3), abs=1e-12)
        assert report.std() == pytest.approx(0.0082, abs=5e-4)

    def test_single_seed_std_zero(self):
        report = MetricReport("d", "accuracy", "lampo", "expected", [SeedResult("seed0", 0.5)])
        assert report.std() == 0.0

    def test_na_cells_carry_error_kind(self):
        report = MetricReport("yelp5", "accuracy", "icl", "icl", [
            SeedResult("seed0", na_kind="context-overflow"),
            SeedResult("seed1", na_kind="context-overflow"),
        ])
        assert report.summary_cell() == "NA(context-overflow)"
        assert "NA(context-overflow)" in render_table([report])

    def test_roundtrip_identical_numbers(self, tmp_path):
        report = MetricReport("d", "macro_f1", "lampo", "mixture", [
            SeedResult("seed0", 0.612345, calls=600, cache_hits=12, extra={"note": [1, 2]}),
            SeedResult("seed1", na_kind="unsupported"),
        ])
        paths = emit_report([report], tmp_path)
        reloaded = load_report(paths["json"])
        assert [r.to_dict() for r in reloaded] == [report.to_dict()]

    def test_mean_std_cell_format(self):
        report = MetricReport("d", "accuracy", "lampo", "expected", [
            SeedResult("seed0", 0.65), SeedResult("seed1", 0.66), SeedResult("seed2", 0.64),
        ])
        assert report.summary_cell() == "0.6500_{0.0082}"


class TestDatasets:
    def _rows(self, space):
        return [(f"text {j}.{i}", space.labels[j]) for j in range(3) for i in range(5)]

    def test_three_seed_five_shot_layout(self, tmp_path, three_way_space):
        root = write_dataset(
            tmp_path,
            seeds={f"seed{i}": self._rows(three_way_space) for i in range(3)},
            test_rows=[("t0", "negative"), ("t1", "positive")],
        )
        ds = load_dataset(root)
        assert sorted(ds.seeds) == ["seed0", "seed1", "seed2"]
        for demos in ds.seeds.values():
            assert len(demos.items) == 15
            assert demos.shots_per_class == 5
        assert len(ds.test) == 2
        assert ds.gold_indices() == [0, 2]

    def test_case_fold_normalization(self, tmp_path, three_way_space):
        root = write_dataset(
            tmp_path,
            seeds={"seed0": [("a", "Positive"), ("b", "negative"), ("c", "NEUTRAL")]},
            test_rows=[("t", "Positive")],
        )
        ds = load_dataset(root)
        assert ds.test[0].label == "positive"
        assert sorted(d.label for d in ds.seeds["seed0"].items) == [0, 1, 2]

    def test_unknown_label_rejected(self, tmp_path, three_way_space):
        root = write_dataset(
            tmp_path,
            seeds={"seed0": [("a", "negative")]},
            test_rows=[("t", "happy")],
        )
        with pytest.raises(UnknownLabelError, match="happy"):
            load_dataset(root)

    def test_malformed_row_reports_line(self, tmp_path):
        root = write_dataset(tmp_path, seeds={"seed0": [("a", "negative")]},
                             test_rows=[("t", "neutral")])
        bad = root / "test.jsonl"
        bad.write_text('{"text": "ok", "label": "neutral"}\nnot json\n', encoding="utf-8")
        with pytest.raises(ValidationError, match="test.jsonl:2"):
            load_dataset(root)

    def test_missing_aspect_on_aspect_task(self, tmp_path):
        root = write_dataset(
            tmp_path,
            template="lap14",
            aspect_based=True,
            seeds={"seed0": [("a", "negative", "battery")]},
            test_rows=[("t", "neutral")],  # aspect missing
        )
        with pytest.raises(ValidationError, match="aspect"):
            load_dataset(root)

    def test_requested_space_must_match(self, tmp_path, three_way_space):
        root = write_dataset(tmp_path, seeds={"seed0": [("a", "negative")]},
                             test_rows=[("t", "neutral")])
        load_dataset(root, three_way_space)
        with pytest.raises(ValidationError, match="do not match"):
            load_dataset(root, OrderedLabelSpace(("low", "high")))


class TestConverter:
    def test_csv_and_jsonl_conversion(self, tmp_path):
        csv_path = tmp_path / "raw.csv"
        csv_path.write_text('sentence,sentiment\n"good, actually",positive\nbad,negative\n',
                            encoding="utf-8")
        rows = convert_rows(csv_path, "csv", "sentence", "sentiment")
        assert rows == [
            {"text": "good, actually", "label": "positive"},
            {"text": "bad", "label": "negative"},
        ]
        out = tmp_path / "out.jsonl"
        write_dataset_file(rows, out)
        reloaded = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
        assert reloaded == rows

    def test_aspect_column(self, tmp_path):
        tsv = tmp_path / "raw.tsv"
        tsv.write_text("t\tl\ta\nnice\tpositive\tbattery\n", encoding="utf-8")
        rows = convert_rows(tsv, "tsv", "t", "l", "a")
        assert rows == [{"text": "nice", "label": "positive", "aspect": "battery"}]

    def test_missing_column_reports_location(self, tmp_path):
        jsonl = tmp_path / "raw.jsonl"
        jsonl.write_text('{"text": "x"}\n', encoding="utf-8")
        with pytest.raises(ValidationError, match="raw.jsonl:1"):
            convert_rows(jsonl, "jsonl", "text", "label")
