"""Git-history mining and team-scaling analysis.

The package mines commit streams from git repositories, converts them
into windowed team-size/output samples under two published schemes,
fits scaling coefficients by ordinary least squares, and quantifies
how sampling and measurement choices move the superlinearity verdict.
"""

__version__ = "0.1.0"

from scalemine.config import RunConfig
from scalemine.distance import backend_name, commit_edit_distance, levenshtein
from scalemine.errors import (
    ConfigError,
    DegenerateStatisticsError,
    EmptyCommitStreamError,
    InsufficientDataError,
    MiningError,
    RecordFormatError,
    ScalemineError,
)
from scalemine.experiments import (
    CrossTable,
    DatasetManifest,
    MethodVariant,
    ProjectEntry,
    SweepResult,
    analyze_project,
    cross_apply,
    drop_first_period_comparison,
    p_filter_comparison,
    parse_method_spec,
    superlinearity_summary,
    sweep_front_load_days,
)
from scalemine.mining import extract_commits, mine_locator
from scalemine.records import (
    CommitRecord,
    FileEdit,
    MiningReport,
    load_records,
    persist_records,
)
from scalemine.regression import (
    EffectiveTeamSize,
    PeriodFit,
    ProjectScaling,
    RegressionResult,
    effective_team_size,
    ols_fit,
    scholtes_alpha3,
    sornette_average_beta,
)
from scalemine.stats import TestOutcome, ks_two_sample, wilcoxon_signed_rank
from scalemine.windows import (
    PeriodSamples,
    WindowSample,
    apply_front_load_filter,
    build_scholtes_samples,
    build_sornette_periods,
    filter_one_time_contributors,
    trim_levenshtein_outliers,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DegenerateStatisticsError",
    "EmptyCommitStreamError",
    "InsufficientDataError",
    "MiningError",
    "RecordFormatError",
    "ScalemineError",
    "CommitRecord",
    "FileEdit",
    "MiningReport",
    "CrossTable",
    "DatasetManifest",
    "MethodVariant",
    "ProjectEntry",
    "SweepResult",
    "EffectiveTeamSize",
    "PeriodFit",
    "ProjectScaling",
    "RegressionResult",
    "PeriodSamples",
    "WindowSample",
    "RunConfig",
    "TestOutcome",
    "analyze_project",
    "apply_front_load_filter",
    "backend_name",
    "build_scholtes_samples",
    "build_sornette_periods",
    "commit_edit_distance",
    "cross_apply",
    "drop_first_period_comparison",
    "effective_team_size",
    "extract_commits",
    "filter_one_time_contributors",
    "ks_two_sample",
    "levenshtein",
    "load_records",
    "mine_locator",
    "ols_fit",
    "p_filter_comparison",
    "parse_method_spec",
    "persist_records",
    "scholtes_alpha3",
    "sornette_average_beta",
    "superlinearity_summary",
    "sweep_front_load_days",
    "trim_levenshtein_outliers",
    "wilcoxon_signed_rank",
]
