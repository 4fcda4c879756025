"""Command-line entry points: classify, calibrate, baseline, simulate,
convert-dataset, and cache maintenance."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import EXIT_OK, ConfigError, LampoError
from .eval_io.datasets import convert_rows, write_dataset_file, write_dataset_spec
from .oracle.cache import GenerationCache
from .runner import JobManifest, SweepConfig, cmd_baseline, cmd_calibrate, cmd_classify, cmd_simulate

logger = logging.getLogger(__name__)


def _add_job_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON job manifest; flags override its fields")
    parser.add_argument("--dataset", help="dataset directory")
    parser.add_argument("--backend-config", help="JSON file with the backend config mapping")
    parser.add_argument("--template", help="template name or file (default: the dataset's)")
    parser.add_argument("--out", dest="out_dir", help="output directory")
    parser.add_argument("--thresholds", dest="threshold_strategy",
                        choices=["expected", "self_supervised", "mixture"])
    parser.add_argument("--seeds", help="comma-separated seed ids (default: all)")
    parser.add_argument("--parallelism", type=int)
    parser.add_argument("--window", type=int, help="threshold search half-width (default: |C|)")
    parser.add_argument("--probing-file", dest="probing_file")
    parser.add_argument("--probing-size", dest="probing_size", type=int)
    parser.add_argument("--probing-orderings", dest="probing_orderings", type=int)
    parser.add_argument("--probing-seed", dest="probing_seed", type=int)
    parser.add_argument("--resume", action="store_true", default=None)
    parser.add_argument("--dry-run", dest="dry_run", action="store_true", default=None)
    parser.add_argument("--no-figures", dest="figures", action="store_false", default=None)


def _manifest_from_args(args: argparse.Namespace, method: str | None = None) -> JobManifest:
    overrides: dict = {}
    for name in (
        "dataset", "template", "out_dir", "threshold_strategy", "parallelism", "window",
        "probing_file", "probing_size", "probing_orderings", "probing_seed",
        "resume", "dry_run", "figures",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "seeds", None):
        overrides["seeds"] = [s.strip() for s in args.seeds.split(",") if s.strip()]
    if getattr(args, "backend_config", None):
        path = Path(args.backend_config)
        if not path.is_file():
            raise ConfigError(f"backend config file not found: {path}")
        overrides["backend"] = json.loads(path.read_text(encoding="utf-8"))
    if method is not None:
        overrides["method"] = method
    if getattr(args, "n_candidates", None) is not None:
        overrides["n_candidates"] = args.n_candidates
    if getattr(args, "ordering_seed", None) is not None:
        overrides["ordering_seed"] = args.ordering_seed
    if getattr(args, "content_free", None) is not None:
        overrides["content_free"] = args.content_free

    if args.config:
        return JobManifest.from_file(args.config, overrides)
    if "dataset" not in overrides:
        raise ConfigError("either --config or --dataset is required")
    return JobManifest.from_dict(overrides)


def _cmd_classify(args) -> int:
    cmd_classify(_manifest_from_args(args, method="lampo"))
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    cmd_calibrate(_manifest_from_args(args, method="lampo"))
    return EXIT_OK


def _cmd_baseline(args) -> int:
    cmd_baseline(_manifest_from_args(args, method=args.method))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    data: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"sweep config not found: {path}")
        data = json.loads(path.read_text(encoding="utf-8"))
    def _floats(raw: str) -> list[float]:
        return [float(v) for v in raw.split(",") if v.strip()]
    def _ints(raw: str) -> list[int]:
        return [int(v) for v in raw.split(",") if v.strip()]
    if args.m_values:
        data["m_values"] = _ints(args.m_values)
    if args.k_values:
        data["k_values"] = _ints(args.k_values)
    if args.noise_values:
        data["noise_values"] = _floats(args.noise_values)
    if args.strategies:
        data["strategies"] = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for name in ("trials", "items_per_trial", "probing_size", "seed", "window"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.out_dir:
        data["out_dir"] = args.out_dir
    if args.figures is not None:
        data["figures"] = args.figures
    cmd_simulate(SweepConfig.from_dict(data))
    return EXIT_OK


def _cmd_convert(args) -> int:
    rows = convert_rows(args.input, args.format, args.text_col, args.label_col, args.aspect_col)
    out_dir = Path(args.out)
    role = args.role if args.role != "demos" else f"demos_seed{args.seed_index}"
    write_dataset_file(rows, out_dir / f"{role}.jsonl")
    if args.labels:
        write_dataset_spec(
            out_dir,
            name=args.name or out_dir.name,
            labels=[s.strip() for s in args.labels.split(",")],
            metric=args.metric,
            template=args.template,
            aspect_based=args.aspect_col is not None,
        )
    print(f"wrote {len(rows)} rows to {out_dir / (role + '.jsonl')}")
    return EXIT_OK


def _cmd_cache(args) -> int:
    cache = GenerationCache(args.path)
    if args.action == "inspect":
        entries = cache.entries()
        parsed_counts: dict[str, int] = {}
        for entry in entries:
            parsed_counts[entry.parsed or "(raw)"] = parsed_counts.get(entry.parsed or "(raw)", 0) + 1
        print(f"{args.path}: {len(entries)} entries")
        for parsed, count in sorted(parsed_counts.items()):
            print(f"  {parsed}: {count}")
        return EXIT_OK
    # prune: rewrite one row per key, dropping duplicate/corrupt history
    target = args.out or args.path
    kept = cache.rewrite(target)
    print(f"pruned {args.path} -> {target}: {kept} entries kept")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lampo",
        description="Few-shot ordinal classification with a pairwise preference oracle",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="score, threshold, and label a test set")
    _add_job_arguments(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("calibrate", help="derive expected / self-supervised / mixture cuts")
    _add_job_arguments(p)
    p.set_defaults(handler=_cmd_calibrate)

    p = sub.add_parser("baseline", help="run a comparison method (icl, cc, globale)")
    _add_job_arguments(p)
    p.add_argument("--method", required=True, choices=["icl", "cc", "globale"])
    p.add_argument("--n-candidates", dest="n_candidates", type=int)
    p.add_argument("--ordering-seed", dest="ordering_seed", type=int)
    p.add_argument("--content-free", dest="content_free")
    p.set_defaults(handler=_cmd_baseline)

    p = sub.add_parser("simulate", help="offline robustness sweep over the simulated oracle")
    p.add_argument("--config", help="JSON sweep config; flags override")
    p.add_argument("--m-values", dest="m_values")
    p.add_argument("--k-values", dest="k_values")
    p.add_argument("--noise-values", dest="noise_values")
    p.add_argument("--strategies")
    p.add_argument("--trials", type=int)
    p.add_argument("--items-per-trial", dest="items_per_trial", type=int)
    p.add_argument("--probing-size", dest="probing_size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("convert-dataset", help="convert delimited/JSONL rows into the dataset schema")
    p.add_argument("--input", required=True)
    p.add_argument("--format", required=True, choices=["jsonl", "csv", "tsv"])
    p.add_argument("--text-col", dest="text_col", required=True)
    p.add_argument("--label-col", dest="label_col", required=True)
    p.add_argument("--aspect-col", dest="aspect_col")
    p.add_argument("--out", required=True, help="dataset directory to write into")
    p.add_argument("--role", required=True, choices=["test", "demos"])
    p.add_argument("--seed-index", dest="seed_index", type=int, default=0)
    p.add_argument("--labels", help="ordered comma-separated label space (writes dataset.json)")
    p.add_argument("--metric", default="accuracy")
    p.add_argument("--name")
    p.add_argument("--template")
    p.set_defaults(handler=_cmd_convert)

    p = sub.add_parser("cache", help="inspect or prune a generation cache file")
    p.add_argument("action", choices=["inspect", "prune"])
    p.add_argument("path")
    p.add_argument("--out", help="prune target (default: rewrite in place)")
    p.set_defaults(handler=_cmd_cache)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except LampoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
