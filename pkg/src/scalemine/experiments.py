"""Bias experiments over sets of mined projects.

Orchestrates the cross-application of both regression methods to named
datasets, the p-filter on/off comparison, the front-load-days sweep,
the first-period-removal robustness check, and the superlinearity
summary with its four headline differences (original, selection
adjusted, method adjusted, both adjusted).

Record pre-filters compose in a fixed order: outlier trimming first
(it operates on raw contributions), then one-time-contributor removal
(a property of the whole history), then the front-load cut, then
windowing.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Callable, Iterable, Sequence

from scalemine.errors import ConfigError, DegenerateStatisticsError, EmptyCommitStreamError
from scalemine.records import (
    CommitRecord,
    day_end_instant,
    day_start_instant,
    load_records,
)
from scalemine.regression import (
    PeriodFit,
    ProjectScaling,
    average_beta,
    fit_sornette_periods,
    scholtes_alpha3,
    sornette_average_beta,
)
from scalemine.stats import TestOutcome, wilcoxon_signed_rank
from scalemine.windows import (
    apply_front_load_filter,
    build_scholtes_samples,
    build_sornette_periods,
    filter_one_time_contributors,
    trim_levenshtein_outliers,
)

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_GRID = list(range(0, 721, 30))


@dataclass(frozen=True)
class ProjectEntry:
    id: str
    locator: str
    start: date
    end: date


@dataclass(frozen=True)
class DatasetManifest:
    """Named list of projects representing one sampling choice."""

    name: str
    projects: tuple[ProjectEntry, ...]

    def __post_init__(self):
        ids = [p.id for p in self.projects]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"manifest {self.name!r} has duplicate project ids")
        for p in self.projects:
            if p.start >= p.end:
                raise ConfigError(
                    f"manifest {self.name!r}: project {p.id!r} has start >= end"
                )

    @classmethod
    def from_dict(cls, obj: dict) -> "DatasetManifest":
        if not isinstance(obj, dict) or "name" not in obj or "projects" not in obj:
            raise ConfigError("manifest must be an object with 'name' and 'projects'")
        projects = []
        for entry in obj["projects"]:
            try:
                projects.append(
                    ProjectEntry(
                        id=str(entry["id"]),
                        locator=str(entry["locator"]),
                        start=date.fromisoformat(entry["start"]),
                        end=date.fromisoformat(entry["end"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad manifest project entry {entry!r}: {exc}") from exc
        return cls(name=str(obj["name"]), projects=tuple(projects))

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        try:
            with Path(path).open("r", encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "projects": [
                {
                    "id": p.id,
                    "locator": p.locator,
                    "start": p.start.isoformat(),
                    "end": p.end.isoformat(),
                }
                for p in self.projects
            ],
        }


@dataclass(frozen=True)
class MethodVariant:
    """One fully-specified analysis recipe.

    `p_threshold` only applies to the per-period method; `model` and
    `front_load_days` shape the whole-history method. A None
    `p_threshold` means every period slope enters the average.
    """

    method: str
    measure: str = ""  # "" = method default
    model: str = "loglog"
    filter_one_timers: bool = False
    p_threshold: float | None = 0.01
    front_load_days: int = 0
    outlier_fraction: float | None = None

    def __post_init__(self):
        if self.method not in ("sornette", "scholtes"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.model not in ("loglog", "loglin"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.measure not in ("", "file_edits", "levenshtein"):
            raise ConfigError(f"unknown measure {self.measure!r}")
        if self.front_load_days < 0:
            raise ConfigError("front_load_days must be non-negative")

    @property
    def effective_measure(self) -> str:
        if self.measure:
            return self.measure
        return "file_edits" if self.method == "sornette" else "levenshtein"

    @property
    def label(self) -> str:
        parts = [self.effective_measure]
        if self.method == "scholtes":
            parts.append(self.model)
        parts.append("one-timers-removed" if self.filter_one_timers else "all-contributors")
        if self.method == "sornette":
            parts.append(f"p<{self.p_threshold:g}" if self.p_threshold is not None else "all-beta")
        if self.front_load_days:
            parts.append(f"fld={self.front_load_days}")
        if self.outlier_fraction is not None:
            parts.append(f"trim={self.outlier_fraction:g}")
        return "|".join(parts)


def parse_method_spec(
    spec: str,
    measure: str = "",
    p_threshold: float | None = 0.01,
    outlier_fraction: float | None = None,
    filter_one_timers: bool = False,
) -> MethodVariant:
    """Build a MethodVariant from a compact spec string.

    The spec is a method name followed by colon-separated options,
    e.g. "sornette", "sornette:nofilter", "scholtes:loglin:fld=330",
    "scholtes:trim=0.025:onetimers". Keyword arguments supply the
    defaults that options override. Options that do not apply to the
    named method are rejected.
    """
    tokens = spec.strip().split(":")
    method = tokens[0]
    if method not in ("sornette", "scholtes"):
        raise ConfigError(f"unknown method {method!r} in spec {spec!r}")
    model = "loglog"
    front_load_days = 0
    for token in tokens[1:]:
        if token in ("loglog", "loglin"):
            if method != "scholtes":
                raise ConfigError(f"model option {token!r} applies to scholtes only")
            model = token
        elif token == "nofilter":
            if method != "sornette":
                raise ConfigError("'nofilter' applies to sornette only")
            p_threshold = None
        elif token == "onetimers":
            filter_one_timers = True
        elif token.startswith("p="):
            if method != "sornette":
                raise ConfigError("'p=' applies to sornette only")
            try:
                p_threshold = float(token[2:])
            except ValueError as exc:
                raise ConfigError(f"bad p threshold in {token!r}") from exc
            if not 0.0 < p_threshold <= 1.0:
                raise ConfigError(f"p threshold out of range in {token!r}")
        elif token.startswith("fld="):
            try:
                front_load_days = int(token[4:])
            except ValueError as exc:
                raise ConfigError(f"bad front-load days in {token!r}") from exc
        elif token.startswith("trim="):
            try:
                outlier_fraction = float(token[5:])
            except ValueError as exc:
                raise ConfigError(f"bad trim fraction in {token!r}") from exc
        elif token.startswith("measure="):
            measure = token[8:]
        else:
            raise ConfigError(f"unknown option {token!r} in method spec {spec!r}")
    if outlier_fraction is not None and not 0.0 <= outlier_fraction < 0.5:
        raise ConfigError(f"trim fraction {outlier_fraction!r} out of [0, 0.5)")
    try:
        return MethodVariant(
            method=method,
            measure=measure,
            model=model,
            filter_one_timers=filter_one_timers,
            p_threshold=p_threshold,
            front_load_days=front_load_days,
            outlier_fraction=outlier_fraction,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def prepare_records(
    records: Sequence[CommitRecord], variant: MethodVariant
) -> list[CommitRecord]:
    """Apply the variant's pre-filters in canonical order."""
    prepared = list(records)
    if variant.outlier_fraction is not None:
        prepared = trim_levenshtein_outliers(prepared, variant.outlier_fraction)
    if variant.filter_one_timers:
        prepared = filter_one_time_contributors(prepared)
    if variant.front_load_days:
        prepared = apply_front_load_filter(prepared, variant.front_load_days)
    return prepared


def analyze_project(
    project: str, records: Sequence[CommitRecord], variant: MethodVariant
) -> ProjectScaling:
    """One ProjectScaling for one project under one variant.

    Projects whose records are filtered away entirely come back
    undetermined rather than failing.
    """
    try:
        prepared = prepare_records(records, variant)
        if variant.method == "sornette":
            periods = build_sornette_periods(prepared, variant.effective_measure)
            return sornette_average_beta(
                periods, variant.p_threshold, project=project, variant=variant.label
            )
        samples = build_scholtes_samples(prepared, variant.effective_measure)
        return scholtes_alpha3(
            samples, variant.model, project=project, variant=variant.label
        )
    except EmptyCommitStreamError:
        return ProjectScaling(
            project=project,
            method=variant.method,
            variant=variant.label,
            coefficient=None,
            classification="undetermined",
            n_points=0,
        )


@dataclass
class CellCounts:
    sublinear: int = 0
    superlinear: int = 0
    undetermined: int = 0

    @property
    def total(self) -> int:
        return self.sublinear + self.superlinear + self.undetermined

    @property
    def determined(self) -> int:
        return self.sublinear + self.superlinear

    def percent_superlinear(self) -> float | None:
        """Superlinear share of determined projects, in percent."""
        if self.determined == 0:
            return None
        return 100.0 * self.superlinear / self.determined


@dataclass
class CrossTable:
    """Classification counts keyed by (method, variant label, dataset)."""

    cells: dict[tuple[str, str, str], CellCounts] = field(default_factory=dict)

    def add(self, method: str, variant: str, dataset: str, classification: str) -> None:
        cell = self.cells.setdefault((method, variant, dataset), CellCounts())
        if classification == "sublinear":
            cell.sublinear += 1
        elif classification == "superlinear":
            cell.superlinear += 1
        elif classification == "undetermined":
            cell.undetermined += 1
        else:
            raise ValueError(f"unknown classification {classification!r}")

    def rows(self) -> list[tuple[str, str, str, CellCounts]]:
        return [
            (method, variant, dataset, self.cells[(method, variant, dataset)])
            for method, variant, dataset in sorted(self.cells)
        ]

    def aggregate(self, method: str, variant: str) -> CellCounts:
        """Counts pooled over every dataset for one method+variant."""
        pooled = CellCounts()
        for (m, v, _), cell in self.cells.items():
            if m == method and v == variant:
                pooled.sublinear += cell.sublinear
                pooled.superlinear += cell.superlinear
                pooled.undetermined += cell.undetermined
        return pooled


@dataclass
class CrossApplyResult:
    table: CrossTable
    scalings: list[ProjectScaling]
    by_dataset: dict[str, list[ProjectScaling]]


RecordsLoader = Callable[[ProjectEntry], Sequence[CommitRecord] | None]


def records_dir_loader(records_dir: str | Path) -> RecordsLoader:
    """Loader resolving <records_dir>/<project_id>.jsonl, clipped to the
    manifest's analysis window (end date inclusive)."""
    root = Path(records_dir)

    def load(entry: ProjectEntry) -> Sequence[CommitRecord] | None:
        path = root / f"{entry.id}.jsonl"
        if not path.exists():
            return None
        records = load_records(path)
        lo = day_start_instant(entry.start)
        hi = day_end_instant(entry.end)
        return [r for r in records if lo <= r.timestamp < hi]

    return load


def _apply_variants(
    entry: ProjectEntry,
    dataset_name: str,
    variants: Sequence[MethodVariant],
    loader: RecordsLoader,
) -> list[ProjectScaling]:
    records = loader(entry)
    if records is None:
        logger.warning(
            "no commit records for project %s in dataset %s; marking undetermined",
            entry.id,
            dataset_name,
        )
        return [
            ProjectScaling(
                project=entry.id,
                method=v.method,
                variant=v.label,
                coefficient=None,
                classification="undetermined",
                n_points=0,
            )
            for v in variants
        ]
    return [analyze_project(entry.id, records, v) for v in variants]


def cross_apply(
    datasets: Sequence[DatasetManifest],
    variants: Sequence[MethodVariant],
    loader: RecordsLoader,
    jobs: int = 1,
) -> CrossApplyResult:
    """Apply every variant to every project of every dataset.

    Projects whose records are missing are classified undetermined with
    a warning; the run continues. Project-level work may fan out over
    `jobs` workers; aggregation is an ordered fold over the manifest
    order, so the result does not depend on the degree of parallelism.
    """
    tasks = [(dataset, entry) for dataset in datasets for entry in dataset.projects]
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_task = list(
                pool.map(
                    lambda t: _apply_variants(t[1], t[0].name, variants, loader), tasks
                )
            )
    else:
        per_task = [
            _apply_variants(entry, dataset.name, variants, loader)
            for dataset, entry in tasks
        ]

    table = CrossTable()
    by_dataset: dict[str, list[ProjectScaling]] = {d.name: [] for d in datasets}
    all_scalings: list[ProjectScaling] = []
    for (dataset, _), results in zip(tasks, per_task):
        for scaling in results:
            table.add(scaling.method, scaling.variant, dataset.name, scaling.classification)
        by_dataset[dataset.name].extend(results)
        all_scalings.extend(results)
    return CrossApplyResult(table=table, scalings=all_scalings, by_dataset=by_dataset)


@dataclass
class PairedComparison:
    """Wilcoxon comparison of two per-project coefficient lists."""

    projects: list[str]
    left: list[float]
    right: list[float]
    test: TestOutcome
    mean_relative_change: float | None


def p_filter_comparison(
    project_fits: Sequence[tuple[str, Sequence[PeriodFit]]],
    p_threshold: float = 0.01,
) -> PairedComparison:
    """Average slope with the p filter vs without, paired per project.

    Only projects determined under both settings are paired. The mean
    relative change is mean((filtered - unfiltered) / filtered) over
    pairs with a nonzero filtered value.
    """
    projects: list[str] = []
    filtered_vals: list[float] = []
    unfiltered_vals: list[float] = []
    for project, fits in project_fits:
        filtered, _ = average_beta(fits, p_threshold)
        unfiltered, _ = average_beta(fits, None)
        if filtered is None or unfiltered is None:
            continue
        projects.append(project)
        filtered_vals.append(filtered)
        unfiltered_vals.append(unfiltered)
    if not projects:
        raise DegenerateStatisticsError(
            "no project is determined under both p-filter settings"
        )
    test = wilcoxon_signed_rank(list(zip(filtered_vals, unfiltered_vals)))
    rel = [
        (f - u) / f
        for f, u in zip(filtered_vals, unfiltered_vals)
        if f != 0.0
    ]
    mean_rel = math.fsum(rel) / len(rel) if rel else None
    return PairedComparison(
        projects=projects,
        left=filtered_vals,
        right=unfiltered_vals,
        test=test,
        mean_relative_change=mean_rel,
    )


def drop_first_period_comparison(
    project_fits: Sequence[tuple[str, Sequence[PeriodFit]]],
    p_threshold: float | None = 0.01,
) -> PairedComparison:
    """Average slope over all periods vs with period 0 removed.

    Only projects with at least two period fits are eligible, and only
    those determined under both settings are paired.
    """
    projects: list[str] = []
    with_all: list[float] = []
    without_first: list[float] = []
    for project, fits in project_fits:
        if len(fits) < 2:
            continue
        rest = [f for f in fits if f.period_index != 0]
        full, _ = average_beta(fits, p_threshold)
        tail, _ = average_beta(rest, p_threshold)
        if full is None or tail is None:
            continue
        projects.append(project)
        with_all.append(full)
        without_first.append(tail)
    if not projects:
        raise DegenerateStatisticsError(
            "no project with >= 2 periods is determined under both settings"
        )
    test = wilcoxon_signed_rank(list(zip(with_all, without_first)))
    return PairedComparison(
        projects=projects,
        left=with_all,
        right=without_first,
        test=test,
        mean_relative_change=None,
    )


@dataclass
class SweepResult:
    """Front-load-days sweep of the whole-history regression."""

    grid: list[int]
    per_project: dict[str, list[float | None]]
    mean_alpha3: list[float | None]
    determined_counts: list[int]


def sweep_front_load_days(
    projects: Sequence[tuple[str, Sequence[CommitRecord]]],
    grid: Sequence[int],
    model: str = "loglog",
    outlier_fraction: float | None = None,
    filter_one_timers: bool = False,
) -> SweepResult:
    """Re-run the whole-history regression per front-load grid value."""
    if not grid:
        raise ValueError("sweep grid is empty")
    grid = list(grid)
    if any(d < 0 for d in grid):
        raise ValueError("sweep grid values must be non-negative")
    if grid != sorted(grid):
        raise ValueError("sweep grid must be ascending")
    per_project: dict[str, list[float | None]] = {}
    for project, records in projects:
        base_variant = MethodVariant(
            method="scholtes",
            model=model,
            outlier_fraction=outlier_fraction,
            filter_one_timers=filter_one_timers,
        )
        row: list[float | None] = []
        for days in grid:
            variant = replace(base_variant, front_load_days=days)
            row.append(analyze_project(project, records, variant).coefficient)
        per_project[project] = row
    mean_alpha3: list[float | None] = []
    determined_counts: list[int] = []
    for i in range(len(grid)):
        determined = [row[i] for row in per_project.values() if row[i] is not None]
        determined_counts.append(len(determined))
        mean_alpha3.append(
            math.fsum(determined) / len(determined) if determined else None
        )
    return SweepResult(
        grid=grid,
        per_project=per_project,
        mean_alpha3=mean_alpha3,
        determined_counts=determined_counts,
    )


@dataclass
class SuperlinearitySummary:
    """Percent superlinear per cross-table row plus the four headline
    differences between the two methods."""

    percentages: dict[tuple[str, str, str], float | None]
    differences: dict[str, float | None]


def superlinearity_summary(
    table: CrossTable,
    sornette_original: str,
    sornette_adjusted: str | None = None,
    scholtes_original: str | None = None,
    scholtes_adjusted: str | None = None,
    sornette_home: str | None = None,
    scholtes_home: str | None = None,
) -> SuperlinearitySummary:
    """Percentages over determined projects and headline differences.

    The four differences compare the per-period method against the
    whole-history method: on each method's home dataset with original
    settings, pooled over all datasets (selection adjusted), on home
    datasets with adjusted settings (method adjusted), and pooled with
    adjusted settings (both adjusted). Differences whose cells are
    missing come back None.
    """
    percentages = {
        key: cell.percent_superlinear() for key, cell in sorted(table.cells.items())
    }

    def cell_pct(method: str, variant: str | None, dataset: str | None) -> float | None:
        if variant is None:
            return None
        if dataset is None:
            return table.aggregate(method, variant).percent_superlinear()
        cell = table.cells.get((method, variant, dataset))
        return cell.percent_superlinear() if cell else None

    def diff(a: float | None, b: float | None) -> float | None:
        if a is None or b is None:
            return None
        return a - b

    differences = {
        "original": diff(
            cell_pct("sornette", sornette_original, sornette_home),
            cell_pct("scholtes", scholtes_original, scholtes_home),
        ),
        "selection_adjusted": diff(
            cell_pct("sornette", sornette_original, None),
            cell_pct("scholtes", scholtes_original, None),
        ),
        "method_adjusted": diff(
            cell_pct("sornette", sornette_adjusted, sornette_home),
            cell_pct("scholtes", scholtes_adjusted, scholtes_home),
        ),
        "both_adjusted": diff(
            cell_pct("sornette", sornette_adjusted, None),
            cell_pct("scholtes", scholtes_adjusted, None),
        ),
    }
    return SuperlinearitySummary(percentages=percentages, differences=differences)


def project_period_fits(
    projects: Iterable[tuple[str, Sequence[CommitRecord]]],
    variant: MethodVariant,
) -> list[tuple[str, list[PeriodFit]]]:
    """Per-period slope fits per project under one per-period variant."""
    out: list[tuple[str, list[PeriodFit]]] = []
    for project, records in projects:
        try:
            prepared = prepare_records(records, variant)
            periods = build_sornette_periods(prepared, variant.effective_measure)
        except EmptyCommitStreamError:
            out.append((project, []))
            continue
        out.append((project, fit_sornette_periods(periods)))
    return out
