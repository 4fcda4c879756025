"""Job orchestration: classify, calibrate, baseline, and simulation sweeps.

A job is described by a manifest (config file plus flag overrides). Comparison
requests drain through a bounded worker pool and are folded by key, so results
never depend on completion order; with a warm cache a re-run is bit-identical
at any parallelism.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .baselines import PromptContext, cc_predict, icl_predict, rank_orderings
from .core import (
    Demonstration,
    DemonstrationSet,
    Item,
    OrderedLabelSpace,
    local_score,
)
from .errors import (
    ConfigError,
    ContextOverflowError,
    ProbingConstructionError,
    TransportError,
    UnparseablePredictionError,
    UnsupportedOperationError,
    ValidationError,
)
from .eval_io.datasets import LoadedDataset, load_dataset
from .eval_io.metrics import compute_metric
from .eval_io.reports import MetricReport, SeedResult, emit_report
from .oracle.backends import (
    DEFAULT_PARALLELISM,
    SimulatedBackend,
    SimulatedBackendConfig,
    backend_from_config,
)
from .oracle.cache import GenerationCache
from .oracle.comparator import PreferenceComparator
from .oracle.templates import get_template
from .probing import ProbingSet, construct_probing_set, load_probing_set, save_probing_set
from .thresholding import (
    SearchConfig,
    Thresholds,
    decide,
    expected_thresholds,
    mixture_thresholds,
    run_threshold_search,
)

logger = logging.getLogger(__name__)

METHODS = ("lampo", "icl", "cc", "globale")
STRATEGIES = ("expected", "self_supervised", "mixture")


@dataclass
class JobManifest:
    """Everything one run needs: the run config plus output and execution knobs."""

    dataset: str
    method: str = "lampo"
    threshold_strategy: str = "expected"
    backend: dict = field(default_factory=lambda: {"kind": "simulated"})
    template: str | None = None
    out_dir: str = "runs/job"
    resume: bool = False
    parallelism: int = DEFAULT_PARALLELISM
    dry_run: bool = False
    figures: bool = True
    seeds: list[str] | None = None
    window: int | None = None
    probing_file: str | None = None
    probing_size: int = 50
    probing_orderings: int = 10
    probing_seed: int = 0
    n_candidates: int = 10
    ordering_seed: int = 0
    content_free: str = "N/A"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r} (expected one of {METHODS})")
        if self.threshold_strategy not in STRATEGIES:
            raise ConfigError(
                f"unknown threshold strategy {self.threshold_strategy!r} (expected one of {STRATEGIES})"
            )
        if self.parallelism < 1:
            raise ConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.probing_size < 0 or self.probing_orderings < 1:
            raise ConfigError("probing_size must be >= 0 and probing_orderings >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "JobManifest":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown manifest field(s): {', '.join(sorted(unknown))}")
        if "dataset" not in data:
            raise ConfigError("manifest needs a 'dataset' field")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "JobManifest":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"manifest file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: malformed JSON ({exc})") from exc
        if overrides:
            data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(data)

    def describe(self) -> str:
        parts = [self.threshold_strategy] if self.method == "lampo" else []
        return ",".join([self.method, *parts])


def _needs_probing(strategy: str) -> bool:
    return strategy in ("self_supervised", "mixture")


def _thresholds_json(t: Thresholds) -> dict:
    return {"cuts": [str(c) for c in t.cuts], "floats": list(t.as_floats())}


def _select_seeds(ds: LoadedDataset, wanted: list[str] | None) -> dict[str, DemonstrationSet]:
    if wanted is None:
        return dict(ds.seeds)
    missing = [s for s in wanted if s not in ds.seeds]
    if missing:
        raise ConfigError(f"unknown seed id(s) {missing}; dataset has {sorted(ds.seeds)}")
    return {s: ds.seeds[s] for s in wanted}


def score_items(
    items: list[Item],
    demos: DemonstrationSet,
    comparator: PreferenceComparator,
    parallelism: int = 1,
) -> list[int]:
    """Score every item against every demonstration through a bounded pool.

    Outcomes are keyed by (item, demo) index and folded after the queue
    drains, so any completion order produces the same scores. A transport
    failure aborts with the count of comparisons still outstanding.
    """
    tasks = [(i, j) for i in range(len(items)) for j in range(len(demos.items))]
    outcomes: dict[tuple[int, int], int] = {}
    if parallelism <= 1:
        for i, j in tasks:
            outcomes[(i, j)] = _compare_or_abort(comparator, items, demos, i, j, outcomes, len(tasks))
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = {
                pool.submit(comparator.compare, items[i], demos.items[j].item): (i, j)
                for i, j in tasks
            }
            failure: Exception | None = None
            for future in as_completed(futures):
                key = futures[future]
                try:
                    outcomes[key] = int(future.result())
                except TransportError as exc:
                    failure = exc
                    break
            if failure is not None:
                outstanding = len(tasks) - len(outcomes)
                raise TransportError(
                    f"{failure} — {outstanding} of {len(tasks)} comparisons outstanding; "
                    "completed ones are cached, re-run with resume"
                ) from failure
    return [
        sum(local_score(outcomes[(i, j)], demos.items[j].label) for j in range(len(demos.items)))
        for i in range(len(items))
    ]


def _compare_or_abort(comparator, items, demos, i, j, outcomes, total) -> int:
    try:
        return int(comparator.compare(items[i], demos.items[j].item))
    except TransportError as exc:
        outstanding = total - len(outcomes)
        raise TransportError(
            f"{exc} — {outstanding} of {total} comparisons outstanding; "
            "completed ones are cached, re-run with resume"
        ) from exc


def _write_manifest_echo(manifest: JobManifest, out_dir: Path) -> None:
    """Persist the fully resolved manifest (defaults included) for audit."""
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _job_cache(manifest: JobManifest) -> GenerationCache:
    out_dir = Path(manifest.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_path = out_dir / "cache.jsonl"
    if cache_path.exists() and not manifest.resume:
        raise ConfigError(
            f"{cache_path} already exists; pass resume to reuse it or pick a fresh out_dir"
        )
    cache = GenerationCache(cache_path)
    if manifest.backend.get("kind") == "replay":
        merged = cache.merge_from(manifest.backend["cache_path"])
        logger.info("replay: merged %d cached generations", merged)
    return cache


def _obtain_probing(
    manifest: JobManifest,
    demos: DemonstrationSet,
    backend,
    seed_id: str,
) -> ProbingSet:
    if manifest.probing_file:
        return load_probing_set(manifest.probing_file)
    probing = construct_probing_set(
        demos,
        backend,
        n_target=manifest.probing_size,
        n_orderings=manifest.probing_orderings,
        seed=manifest.probing_seed,
    )
    out_path = Path(manifest.out_dir) / f"probing_{seed_id}.txt"
    save_probing_set(probing, out_path)
    return probing


def resolve_thresholds(
    strategy: str,
    demos: DemonstrationSet,
    probing_scores: list[int] | None,
    window: int | None = None,
) -> tuple[Thresholds, dict]:
    """Derive the decision cuts for one strategy, with audit diagnostics."""
    m = len(demos.label_space)
    labels = [d.label for d in demos.items]
    expected = expected_thresholds(labels, m)
    diag: dict = {"strategy": strategy, "expected": _thresholds_json(expected)}
    if strategy == "expected":
        return expected, diag
    if probing_scores is None:
        raise ValidationError(f"strategy {strategy!r} needs probing scores")
    cfg = SearchConfig(window=window if window is not None else len(demos.items))
    search = run_threshold_search(probing_scores, labels, m, cfg)
    diag["self_supervised"] = search.to_dict()
    if strategy == "self_supervised":
        return search.thresholds, diag
    mixed = mixture_thresholds(expected, search.thresholds)
    diag["mixture"] = _thresholds_json(mixed)
    return mixed, diag


def _write_predictions(
    out_dir: Path,
    seed_id: str,
    records,
    scores: list[int],
    predictions: list[int],
    space: OrderedLabelSpace,
) -> None:
    jsonl_path = out_dir / f"predictions_{seed_id}.jsonl"
    tsv_path = out_dir / f"predictions_{seed_id}.tsv"
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for record, score, pred in zip(records, scores, predictions):
            fh.write(json.dumps({
                "text": record.text,
                "aspect": record.aspect,
                "gold": record.label,
                "score": score,
                "predicted": space.label(pred) if pred >= 0 else None,
            }, ensure_ascii=False) + "\n")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("text\tgold\tscore\tpredicted\n")
        for record, score, pred in zip(records, scores, predictions):
            clean = record.text.replace("\t", " ").replace("\n", " ")
            predicted = space.label(pred) if pred >= 0 else "NA"
            fh.write(f"{clean}\t{record.label}\t{score}\t{predicted}\n")


def plan_classify_calls(manifest: JobManifest) -> dict:
    """Call budget for a classify job, known before any network work."""
    ds = load_dataset(manifest.dataset)
    seeds = _select_seeds(ds, manifest.seeds)
    probing = _needs_probing(manifest.threshold_strategy)
    per_seed = {}
    total = 0
    generation_budget = 0
    for seed_id, demos in seeds.items():
        n = 2 * len(demos.items) * len(ds.test)
        probe_n = 0
        if probing:
            probe_count = manifest.probing_size
            if manifest.probing_file:
                probe_count = len(load_probing_set(manifest.probing_file))
            else:
                generation_budget += manifest.probing_orderings
            probe_n = 2 * len(demos.items) * probe_count
        per_seed[seed_id] = {"comparison_calls": n, "probing_comparison_calls": probe_n}
        total += n + probe_n
    return {
        "per_seed": per_seed,
        "total_comparison_calls": total,
        "needs_probing": probing,
        "probing_generation_calls_max": generation_budget,
    }


def cmd_classify(manifest: JobManifest) -> dict:
    """Score, threshold, decide, and report for every selected seed."""
    if manifest.method != "lampo":
        raise ConfigError(f"classify runs the pairwise method; got method {manifest.method!r}")
    ds = load_dataset(manifest.dataset)
    template = get_template(manifest.template or ds.template_id)
    if template.aspect_based and not ds.aspect_based:
        raise ConfigError(
            f"template {template.name!r} needs aspects but dataset {ds.name!r} has none"
        )
    if manifest.dry_run:
        plan = plan_classify_calls(manifest)
        print(f"dry run: {plan['total_comparison_calls']} comparison calls planned")
        for seed_id, row in plan["per_seed"].items():
            extra = f" + {row['probing_comparison_calls']} probing" if plan["needs_probing"] else ""
            print(f"  {seed_id}: {row['comparison_calls']} test comparisons{extra}")
        if plan["probing_generation_calls_max"]:
            print(f"  plus up to {plan['probing_generation_calls_max']} probing-generation calls")
        return {"plan": plan, "reports": []}

    seeds = _select_seeds(ds, manifest.seeds)
    plan = plan_classify_calls(manifest)
    note = ""
    if plan["probing_generation_calls_max"]:
        note = f", plus up to {plan['probing_generation_calls_max']} probing-generation calls"
    print(f"planned comparison calls: {plan['total_comparison_calls']} "
          f"(2 per comparison, each comparison issued once{note})")
    backend = backend_from_config(manifest.backend)
    cache = _job_cache(manifest)
    comparator = PreferenceComparator(template, backend, cache)
    out_dir = Path(manifest.out_dir)
    _write_manifest_echo(manifest, out_dir)

    seed_results: list[SeedResult] = []
    predictions_by_seed: dict[str, list[int]] = {}
    for seed_id, demos in seeds.items():
        calls_before, hits_before = backend.calls, cache.hits
        probing_scores = None
        if _needs_probing(manifest.threshold_strategy):
            probing = _obtain_probing(manifest, demos, backend, seed_id)
            probe_items = [Item(text) for text in probing]
            probing_scores = score_items(probe_items, demos, comparator, manifest.parallelism)
        thresholds, diag = resolve_thresholds(
            manifest.threshold_strategy, demos, probing_scores, manifest.window
        )
        items = [Item(r.text, r.aspect) for r in ds.test]
        scores = score_items(items, demos, comparator, manifest.parallelism)
        preds = [decide(s, thresholds, ds.space) for s in scores]
        golds = ds.gold_indices()
        value = compute_metric(ds.metric_id, preds, golds, ds.space)
        _write_predictions(out_dir, seed_id, ds.test, scores, preds, ds.space)
        if manifest.figures:
            from .figures import save_score_histogram

            save_score_histogram(
                scores, thresholds, out_dir / f"scores_{seed_id}.png",
                title=f"{ds.name} {seed_id}: scores vs cuts",
            )
        seed_results.append(SeedResult(
            seed_id=seed_id,
            value=value,
            calls=backend.calls - calls_before,
            cache_hits=cache.hits - hits_before,
            extra={"thresholds": _thresholds_json(thresholds), "diagnostics": diag},
        ))
        predictions_by_seed[seed_id] = preds

    report = MetricReport(
        dataset=ds.name,
        metric_id=ds.metric_id,
        method="lampo",
        config=manifest.describe(),
        seeds=seed_results,
    )
    paths = emit_report([report], out_dir)
    if manifest.figures and report.values():
        from .figures import save_seed_metric_bars

        save_seed_metric_bars(
            {s.seed_id: s.value for s in seed_results if s.value is not None},
            ds.metric_id,
            out_dir / "metric_by_seed.png",
            title=f"{ds.name}: {ds.metric_id} by seed",
        )
    print(f"classify: {report.summary_cell()} {ds.metric_id} on {ds.name} "
          f"({backend.calls} backend calls, {cache.hits} cache hits)")
    return {"reports": [report], "paths": paths, "predictions": predictions_by_seed,
            "backend_calls": backend.calls, "cache_hits": cache.hits}


def cmd_calibrate(manifest: JobManifest) -> dict:
    """Emit expected, self-supervised, and mixture cuts with entropy diagnostics."""
    ds = load_dataset(manifest.dataset)
    template = get_template(manifest.template or ds.template_id)
    seeds = _select_seeds(ds, manifest.seeds)
    backend = backend_from_config(manifest.backend)
    cache = _job_cache(manifest)
    comparator = PreferenceComparator(template, backend, cache)
    out_dir = Path(manifest.out_dir)
    _write_manifest_echo(manifest, out_dir)

    rows = []
    for seed_id, demos in seeds.items():
        labels = [d.label for d in demos.items]
        m = len(ds.space)
        expected = expected_thresholds(labels, m)
        row: dict = {"seed": seed_id, "expected": _thresholds_json(expected), "warning": None}
        try:
            probing = _obtain_probing(manifest, demos, backend, seed_id)
            probe_items = [Item(text) for text in probing]
            probing_scores = score_items(probe_items, demos, comparator, manifest.parallelism)
            window = manifest.window if manifest.window is not None else len(demos.items)
            search = run_threshold_search(probing_scores, labels, m, SearchConfig(window=window))
            row["self_supervised"] = search.to_dict()
            row["mixture"] = _thresholds_json(mixture_thresholds(expected, search.thresholds))
            row["probing_scores"] = probing_scores
            if manifest.figures:
                from .figures import save_score_histogram

                save_score_histogram(
                    probing_scores, search.thresholds,
                    out_dir / f"probing_scores_{seed_id}.png",
                    title=f"{ds.name} {seed_id}: probing scores vs self-supervised cuts",
                )
        except ProbingConstructionError as exc:
            logger.warning("%s: probing construction failed (%s); falling back to expected", seed_id, exc)
            row["warning"] = f"probing-construction-failed: {exc}"
            row["self_supervised"] = None
            row["mixture"] = None
        rows.append(row)

    payload = {"dataset": ds.name, "rows": rows}
    path = out_dir / "calibration.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for row in rows:
        summary = row["expected"]["floats"]
        print(f"calibrate {row['seed']}: expected={summary}", end="")
        if row.get("mixture"):
            print(f" mixture={row['mixture']['floats']}", end="")
        if row["warning"]:
            print(f" [warning: {row['warning']}]", end="")
        print()
    return {"rows": rows, "path": path}


def _baseline_seed_icl(ctx, ds, backend, cache) -> tuple[list[int], int]:
    preds: list[int] = []
    unparseable = 0
    for record in ds.test:
        try:
            preds.append(icl_predict(ctx, Item(record.text, record.aspect), backend, ds.space, cache))
        except UnparseablePredictionError:
            preds.append(-1)
            unparseable += 1
    return preds, unparseable


def cmd_baseline(manifest: JobManifest) -> dict:
    """Run one comparison method over every seed, reporting in the shared schema."""
    if manifest.method not in ("icl", "cc", "globale"):
        raise ConfigError(f"baseline method must be icl, cc, or globale; got {manifest.method!r}")
    ds = load_dataset(manifest.dataset)
    seeds = _select_seeds(ds, manifest.seeds)
    if manifest.backend.get("kind") == "simulated" and "labels" not in manifest.backend:
        manifest.backend = {**manifest.backend, "labels": list(ds.space.labels)}
    backend = backend_from_config(manifest.backend)
    cache = _job_cache(manifest)
    out_dir = Path(manifest.out_dir)
    _write_manifest_echo(manifest, out_dir)
    golds = ds.gold_indices()

    seed_results: list[SeedResult] = []
    for seed_id, demos in seeds.items():
        calls_before, hits_before = backend.calls, cache.hits
        ctx = PromptContext(ds.instruction, demos.items, ordering_id=0)
        extra: dict = {}
        try:
            if manifest.method == "globale":
                probing = _obtain_probing(manifest, demos, backend, seed_id)
                selection = rank_orderings(
                    demos, manifest.n_candidates, probing, backend, ds.space,
                    seed=manifest.ordering_seed, instruction=ds.instruction, cache=cache,
                )
                ctx = selection.context
                extra["ordering_id"] = ctx.ordering_id
                extra["ordering_entropy"] = selection.entropy
            if manifest.method == "cc":
                preds = [
                    cc_predict(ctx, Item(r.text, r.aspect), backend, ds.space, manifest.content_free)
                    for r in ds.test
                ]
                unparseable = 0
            else:
                preds, unparseable = _baseline_seed_icl(ctx, ds, backend, cache)
            value = compute_metric(ds.metric_id, preds, golds, ds.space)
            extra["unparseable"] = unparseable
            seed_results.append(SeedResult(
                seed_id=seed_id, value=value,
                calls=backend.calls - calls_before,
                cache_hits=cache.hits - hits_before,
                extra=extra,
            ))
        except ContextOverflowError:
            seed_results.append(SeedResult(
                seed_id=seed_id, na_kind="context-overflow",
                calls=backend.calls - calls_before,
                cache_hits=cache.hits - hits_before,
            ))
        except UnsupportedOperationError:
            seed_results.append(SeedResult(
                seed_id=seed_id, na_kind="unsupported",
                calls=backend.calls - calls_before,
                cache_hits=cache.hits - hits_before,
            ))

    report = MetricReport(
        dataset=ds.name, metric_id=ds.metric_id,
        method=manifest.method, config=manifest.describe(), seeds=seed_results,
    )
    paths = emit_report([report], out_dir)
    if manifest.figures and report.values():
        from .figures import save_seed_metric_bars

        save_seed_metric_bars(
            {s.seed_id: s.value for s in seed_results if s.value is not None},
            ds.metric_id, out_dir / "metric_by_seed.png",
            title=f"{ds.name}: {manifest.method} {ds.metric_id} by seed",
        )
    print(f"baseline[{manifest.method}]: {report.summary_cell()} {ds.metric_id} on {ds.name}")
    return {"reports": [report], "paths": paths}


@dataclass
class SweepConfig:
    """Grid for offline robustness sweeps over the simulated oracle."""

    m_values: list[int] = field(default_factory=lambda: [3])
    k_values: list[int] = field(default_factory=lambda: [5])
    noise_values: list[float] = field(default_factory=lambda: [0.0, 0.2, 0.4])
    strategies: list[str] = field(default_factory=lambda: ["expected"])
    trials: int = 100
    items_per_trial: int = 30
    probing_size: int = 50
    tie_margin: float = 0.0
    seed: int = 0
    window: int | None = None
    out_dir: str = "runs/sweep"
    figures: bool = True

    def __post_init__(self):
        if self.trials < 1 or self.items_per_trial < 1:
            raise ConfigError("trials and items_per_trial must be >= 1")
        for m in self.m_values:
            if m < 2:
                raise ConfigError(f"m must be >= 2, got {m}")
        for k in self.k_values:
            if k < 1:
                raise ConfigError(f"k must be >= 1, got {k}")
        for eps in self.noise_values:
            if not 0.0 <= eps <= 1.0:
                raise ConfigError(f"noise must be in [0, 1], got {eps}")
        for strategy in self.strategies:
            if strategy not in STRATEGIES:
                raise ConfigError(f"unknown strategy {strategy!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown sweep field(s): {', '.join(sorted(unknown))}")
        return cls(**data)


def _trial_seed(base: int, m: int, k: int, noise: float, trial: int) -> int:
    blob = f"{base}|{m}|{k}|{noise!r}|{trial}".encode()
    return int.from_bytes(hashlib.blake2b(blob, digest_size=8).digest(), "big")


def simulate_trial(
    m: int,
    k: int,
    noise: float,
    strategy: str,
    trial_seed: int,
    items_per_trial: int,
    probing_size: int,
    tie_margin: float = 0.0,
    window: int | None = None,
) -> float:
    """One synthetic trial: balanced latent demos, round-robin test classes."""
    space = OrderedLabelSpace(tuple(f"level{j}" for j in range(m)))
    demos = DemonstrationSet(
        tuple(
            Demonstration(f"demo latent={j} #s{trial_seed}c{j}i{i}", j)
            for j in range(m)
            for i in range(k)
        ),
        space,
        shots_per_class=k,
    )
    items = [
        Item(f"test latent={i % m} #s{trial_seed}t{i}")
        for i in range(items_per_trial)
    ]
    golds = [i % m for i in range(items_per_trial)]
    backend = SimulatedBackend(SimulatedBackendConfig(
        noise=noise, tie_margin=tie_margin, seed=trial_seed,
    ))
    comparator = PreferenceComparator(get_template("twitter"), backend)
    probing_scores = None
    if _needs_probing(strategy):
        rng = random.Random(trial_seed)
        probe_items = [
            Item(f"probe latent={rng.uniform(0, m - 1):.4f} #s{trial_seed}p{i}")
            for i in range(probing_size)
        ]
        probing_scores = score_items(probe_items, demos, comparator)
    thresholds, _ = resolve_thresholds(strategy, demos, probing_scores, window)
    scores = score_items(items, demos, comparator)
    preds = [decide(s, thresholds, space) for s in scores]
    return sum(1 for p, g in zip(preds, golds) if p == g) / len(golds)


def cmd_simulate(cfg: SweepConfig) -> dict:
    """Sweep (m, k, noise, strategy) cells; report mean accuracy per cell."""
    rows: list[dict] = []
    for m in cfg.m_values:
        for k in cfg.k_values:
            for noise in cfg.noise_values:
                for strategy in cfg.strategies:
                    total = 0.0
                    for trial in range(cfg.trials):
                        total += simulate_trial(
                            m, k, noise, strategy,
                            _trial_seed(cfg.seed, m, k, noise, trial),
                            cfg.items_per_trial,
                            cfg.probing_size,
                            cfg.tie_margin,
                            cfg.window,
                        )
                    rows.append({
                        "m": m, "k": k, "noise": noise, "strategy": strategy,
                        "trials": cfg.trials,
                        "items_per_trial": cfg.items_per_trial,
                        "mean_accuracy": total / cfg.trials,
                    })
                    logger.info("sweep cell %s", rows[-1])

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "sweep.json"
    json_path.write_text(json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    tsv_path = out_dir / "sweep.tsv"
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("m\tk\tnoise\tstrategy\ttrials\titems_per_trial\tmean_accuracy\n")
        for row in rows:
            fh.write(
                f"{row['m']}\t{row['k']}\t{row['noise']}\t{row['strategy']}\t"
                f"{row['trials']}\t{row['items_per_trial']}\t{row['mean_accuracy']:.6f}\n"
            )
    paths = {"json": json_path, "tsv": tsv_path}
    if cfg.figures:
        from .figures import save_sweep_curves

        paths["figure"] = save_sweep_curves(rows, out_dir / "sweep.png")
    for row in rows:
        print(
            f"simulate m={row['m']} k={row['k']} noise={row['noise']} "
            f"{row['strategy']}: accuracy {row['mean_accuracy']:.4f} over {row['trials']} trials"
        )
    return {"rows": rows, "paths": paths}
