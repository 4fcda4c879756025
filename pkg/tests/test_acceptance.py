"""Acceptance suite: one test per criterion, each printing its pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from lampo import (
    JobManifest,
    OrderedLabelSpace,
    SweepConfig,
    Thresholds,
    cmd_classify,
    cmd_simulate,
    compute_metric,
    decide,
    expected_scores,
    expected_thresholds,
    globale_select_ordering,
    label_entropy,
    mixture_thresholds,
    run_threshold_search,
    sample_orderings,
    save_probing_set,
)
from lampo.core import Item
from lampo.probing import ProbingSet
from lampo.thresholding import SearchConfig

from conftest import balanced_demos, latent_dataset_rows, make_space, sim_comparator, write_dataset


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def test_criterion_1_running_example_golden():
    with criterion("1 running-example golden values"):
        started = time.monotonic()
        space = OrderedLabelSpace(("negative", "neutral", "positive"))
        labels = [0] * 5 + [1] * 5 + [2] * 5

        assert expected_scores(labels, 3) == [5, 15, 25]
        assert expected_thresholds(labels, 3).cuts == (Fraction(10), Fraction(20))
        mixed = mixture_thresholds(Thresholds((10, 20)), Thresholds((12, 21)))
        assert mixed.cuts == (Fraction(11), Fraction(41, 2))
        assert space.label(decide(16, mixed, space)) == "neutral"

        assert time.monotonic() - started < 1.0


def test_criterion_2_noise_free_exact_recovery(tmp_path):
    with criterion("2 noise-free exact recovery over the (m, k) grid"):
        started = time.monotonic()
        result = cmd_simulate(SweepConfig(
            m_values=[2, 3, 4, 5],
            k_values=[1, 5, 10],
            noise_values=[0.0],
            strategies=["expected"],
            trials=1,
            items_per_trial=300,
            out_dir=str(tmp_path / "sweep"),
            figures=False,
        ))
        assert len(result["rows"]) == 12
        for row in result["rows"]:
            assert row["mean_accuracy"] == 1.0, row
        assert time.monotonic() - started < 30.0


def _oracle_full_enumeration(probing_scores, demo_labels, m):
    """Independent brute force: enumerate every increasing tuple, decide by loop."""
    lo = sum(demo_labels) - len(demo_labels)
    hi = sum(demo_labels) + len(demo_labels)

    def plain_decide(score, cuts):
        label = 0
        for j, cut in enumerate(cuts, start=1):
            if score >= cut:
                label = j
        return label

    best = -1.0
    for cuts in itertools.combinations(range(lo, hi + 1), m - 1):
        preds = [plain_decide(s, cuts) for s in probing_scores]
        h = label_entropy(preds, m)
        if h > best:
            best = h
    return best


def test_criterion_3_search_matches_exhaustive_oracle():
    with criterion("3 windowed search equals unwindowed exhaustive enumeration"):
        rng = random.Random(2024)
        for instance in range(50):
            k = rng.randrange(1, 6)  # |C| = 3k, attainable width 6k <= 30
            labels = [j for j in range(3) for _ in range(k)]
            lo, hi = 3 * k - 3 * k, 3 * k + 3 * k
            probing = [rng.randrange(lo, hi + 1) for _ in range(rng.randrange(5, 51))]
            # Window 2|C| covers the whole attainable range around any expected cut.
            search = run_threshold_search(
                probing, labels, 3, SearchConfig(window=2 * len(labels))
            )
            assert search.entropy == _oracle_full_enumeration(probing, labels, 3), instance


def test_criterion_4_debias_antisymmetry():
    with criterion("4 debiased comparison antisymmetry over 1000 pairs"):
        rng = random.Random(99)
        forward = sim_comparator(noise=0.3, tie_margin=0.05, seed=17)
        backward = sim_comparator(noise=0.3, tie_margin=0.05, seed=17)  # separate cache
        violations = 0
        for i in range(1000):
            x = Item(f"x latent={rng.uniform(0, 2):.4f} #anti{i}")
            y = Item(f"y latent={rng.uniform(0, 2):.4f} #anti{i}")
            if int(forward.compare(x, y)) != -int(backward.compare(y, x)):
                violations += 1
        assert violations == 0


def test_criterion_5_noise_monotonicity(tmp_path):
    with criterion("5 accuracy strictly decreases with comparison noise"):
        started = time.monotonic()
        result = cmd_simulate(SweepConfig(
            m_values=[3],
            k_values=[5],
            noise_values=[0.0, 0.2, 0.4],
            strategies=["expected"],
            trials=100,
            items_per_trial=30,
            out_dir=str(tmp_path / "sweep"),
            figures=False,
        ))
        by_noise = {row["noise"]: row["mean_accuracy"] for row in result["rows"]}
        assert by_noise[0.0] - by_noise[0.2] >= 0.02, by_noise
        assert by_noise[0.2] - by_noise[0.4] >= 0.02, by_noise
        assert time.monotonic() - started < 120.0


class _PlantedOrderingBackend:
    """Uniform probe predictions for one permutation's context, constant otherwise."""

    name = "planted"
    max_prompt_chars = None
    calls = 0

    def __init__(self, space, planted_context_lines: str):
        self.space = space
        self.planted = planted_context_lines
        self._counter = 0

    def generate(self, prompt, nonce=0):
        self.calls += 1
        if self.planted in prompt:
            j = self._counter % len(self.space)
            self._counter += 1
            return self.space.labels[j]
        return self.space.labels[0]


def test_criterion_6_globale_planted_bias():
    with criterion("6 ordering selection recovers the planted ordering 20/20"):
        from lampo.probing import linearize_example

        space = make_space(3)
        demos = balanced_demos(space, 2, tag="plant")
        probing = ProbingSet(tuple(f"probe {i}" for i in range(9)))
        for rep in range(20):
            seed = 1000 + rep
            orderings = sample_orderings(len(demos.items), 10, seed=seed)
            assert len(orderings) == 10
            planted_index = rep % 10
            planted_lines = "\n".join(
                linearize_example(demos.items[i], space) for i in orderings[planted_index]
            )
            backend = _PlantedOrderingBackend(space, planted_lines)
            ctx = globale_select_ordering(demos, 10, probing, backend, space, seed=seed)
            assert ctx.ordering_id == planted_index, (rep, ctx.ordering_id)


def test_criterion_7_metrics_against_confusion_oracle(three_way_space):
    with criterion("7 metrics match an independent confusion-matrix computation"):
        golds = [0, 0, 0, 1, 1, 1, 2, 2, 2, 2]
        preds = [0, 1, 0, 1, 1, 2, 2, 2, 0, 2]

        m = 3
        grid = [[0] * m for _ in range(m)]
        for p, g in zip(preds, golds):
            grid[p][g] += 1
        oracle_acc = sum(grid[j][j] for j in range(m)) / len(golds)
        oracle_f1 = []
        for j in range(m):
            tp = grid[j][j]
            fp = sum(grid[j]) - tp
            fn = sum(grid[g][j] for g in range(m)) - tp
            precision = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / (tp + fn) if tp + fn else 0.0
            oracle_f1.append(
                2 * precision * recall / (precision + recall) if precision + recall else 0.0
            )
        oracle_macro = sum(oracle_f1) / m

        assert abs(compute_metric("accuracy", preds, golds, three_way_space) - oracle_acc) < 1e-12
        assert abs(compute_metric("macro_f1", preds, golds, three_way_space) - oracle_macro) < 1e-12
        assert abs(
            compute_metric("f1(neutral)", preds, golds, three_way_space) - oracle_f1[1]
        ) < 1e-12


def _call_accounting_dataset(tmp_path):
    space = make_space(3)
    return write_dataset(
        tmp_path, name="acct", labels=space.labels,
        seeds={"seed0": latent_dataset_rows(space, 5, "acct")},
        test_rows=[(f"t latent={i % 3} #acct{i}", space.labels[i % 3]) for i in range(20)],
    )


def test_criterion_8_call_accounting(tmp_path):
    with criterion("8 backend call accounting (600, then 600 + 1500)"):
        root = _call_accounting_dataset(tmp_path)

        fresh = cmd_classify(JobManifest(
            dataset=str(root), out_dir=str(tmp_path / "expected_run"),
            backend={"kind": "simulated"}, figures=False,
        ))
        assert fresh["backend_calls"] == 2 * 15 * 20 == 600

        probing = ProbingSet(tuple(f"probe latent={(i % 3) + 0.25:.2f} #acctp{i}" for i in range(50)))
        probing_path = tmp_path / "probing.txt"
        save_probing_set(probing, probing_path)
        with_search = cmd_classify(JobManifest(
            dataset=str(root), out_dir=str(tmp_path / "ss_run"),
            backend={"kind": "simulated"}, figures=False,
            threshold_strategy="self_supervised", probing_file=str(probing_path),
        ))
        assert with_search["backend_calls"] == 600 + 2 * 15 * 50 == 2100


@pytest.mark.skipif(
    not os.environ.get("LAMPO_LIVE_URL"),
    reason="live smoke test needs LAMPO_LIVE_URL (and optional LAMPO_LIVE_EXTRACT/HEADERS/BODY)",
)
def test_criterion_9_optional_live_smoke(tmp_path):
    """Pipeline-completion smoke against a real endpoint: shape only, no metric claims."""
    with criterion("9 live-backend smoke (report shape only)"):
        backend = {
            "kind": "http",
            "url": os.environ["LAMPO_LIVE_URL"],
            "extract_path": os.environ.get("LAMPO_LIVE_EXTRACT", "text"),
        }
        if os.environ.get("LAMPO_LIVE_HEADERS"):
            backend["headers"] = json.loads(os.environ["LAMPO_LIVE_HEADERS"])
        if os.environ.get("LAMPO_LIVE_BODY"):
            backend["body_template"] = os.environ["LAMPO_LIVE_BODY"]
        space = make_space(2)
        root = write_dataset(
            tmp_path, name="live", labels=("low", "high"), template="hate",
            seeds={"seed0": [("a calm note", "low"), ("a furious rant", "high")]},
            test_rows=[("a mild comment", "low"), ("an angry outburst", "high")],
        )
        result = cmd_classify(JobManifest(
            dataset=str(root), out_dir=str(tmp_path / "live_run"),
            backend=backend, figures=False, parallelism=2,
        ))
        report = result["reports"][0]
        assert report.seeds and report.seeds[0].value is not None
        assert (tmp_path / "live_run" / "report.json").exists()
        assert (tmp_path / "live_run" / "report.tsv").exists()
