"""Dataset ingestion, metrics, and report emission."""

from .datasets import (
    DatasetRecord,
    LoadedDataset,
    convert_rows,
    load_dataset,
    write_dataset_file,
    write_dataset_spec,
)
from .metrics import (
    accuracy,
    compute_metric,
    f1_of_label,
    macro_f1,
    per_class_f1,
    validate_metric_id,
)
from .reports import MetricReport, SeedResult, emit_report, load_report, render_table

__all__ = [
    "DatasetRecord",
    "LoadedDataset",
    "MetricReport",
    "SeedResult",
    "accuracy",
    "compute_metric",
    "convert_rows",
    "emit_report",
    "f1_of_label",
    "load_dataset",
    "load_report",
    "macro_f1",
    "per_class_f1",
    "render_table",
    "validate_metric_id",
    "write_dataset_file",
    "write_dataset_spec",
]
