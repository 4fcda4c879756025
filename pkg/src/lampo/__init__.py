"""Few-shot ordinal classification with a language model as a pairwise preference oracle.

The pipeline: compare the test instance against every demonstration through an
order-debiased preference oracle, sum the three-valued outcomes into an integer
score, and convert the score to an ordinal label with self-calibrated
thresholds. Pointwise few-shot prediction, contextual calibration, and
entropy-based ordering selection ship as baselines.
"""

from .core import (
    Demonstration,
    DemonstrationSet,
    Item,
    OrderedLabelSpace,
    label_index,
    local_score,
    score_bounds,
    score_instance,
)
from .oracle import (
    BUILTIN_TEMPLATES,
    ComparisonOutcome,
    GenerationCache,
    HttpBackend,
    HttpBackendConfig,
    Preference,
    PreferenceComparator,
    PromptTemplate,
    ReplayBackend,
    ReplayBackendConfig,
    SimulatedBackend,
    SimulatedBackendConfig,
    backend_from_config,
    compare_debiased,
    get_template,
    parse_preference,
    render_prompt,
    simulated_compare,
)
from .probing import ProbingSet, construct_probing_set, linearize_example, load_probing_set, save_probing_set
from .thresholding import (
    SearchConfig,
    Thresholds,
    decide,
    expected_scores,
    expected_thresholds,
    label_entropy,
    mixture_thresholds,
    run_threshold_search,
    search_self_supervised_thresholds,
)
from .baselines import (
    PromptContext,
    ProbabilityVector,
    cc_predict,
    contextual_calibrate,
    globale_select_ordering,
    icl_predict,
    rank_orderings,
    sample_orderings,
)
from .eval_io import MetricReport, SeedResult, compute_metric, emit_report, load_dataset, load_report
from .runner import JobManifest, SweepConfig, cmd_baseline, cmd_calibrate, cmd_classify, cmd_simulate

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_TEMPLATES",
    "ComparisonOutcome",
    "Demonstration",
    "DemonstrationSet",
    "GenerationCache",
    "HttpBackend",
    "HttpBackendConfig",
    "Item",
    "JobManifest",
    "MetricReport",
    "OrderedLabelSpace",
    "Preference",
    "PreferenceComparator",
    "ProbabilityVector",
    "ProbingSet",
    "PromptContext",
    "PromptTemplate",
    "ReplayBackend",
    "ReplayBackendConfig",
    "SearchConfig",
    "SeedResult",
    "SimulatedBackend",
    "SimulatedBackendConfig",
    "SweepConfig",
    "Thresholds",
    "backend_from_config",
    "cc_predict",
    "cmd_baseline",
    "cmd_calibrate",
    "cmd_classify",
    "cmd_simulate",
    "compare_debiased",
    "compute_metric",
    "construct_probing_set",
    "contextual_calibrate",
    "decide",
    "emit_report",
    "expected_scores",
    "expected_thresholds",
    "get_template",
    "globale_select_ordering",
    "icl_predict",
    "label_entropy",
    "label_index",
    "linearize_example",
    "load_dataset",
    "load_probing_set",
    "load_report",
    "local_score",
    "mixture_thresholds",
    "parse_preference",
    "rank_orderings",
    "render_prompt",
    "run_threshold_search",
    "sample_orderings",
    "save_probing_set",
    "score_bounds",
    "score_instance",
    "search_self_supervised_thresholds",
    "simulated_compare",
]
