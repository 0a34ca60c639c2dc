"""Command-line entry points.

Five subcommands cover the pipeline: `mine` turns a git repository
into a commit-record file, `analyze` fits both scaling methods over
dataset manifests, `sweep` varies the front-load cut, `compare` runs
the paired and cross-dataset significance tests, and `report` renders
the analysis outputs as SVG charts backed by CSVs.

Exit codes: 0 success, 2 usage or input error, 3 degenerate
statistics. All output files are deterministic: byte-identical across
re-runs and across --jobs settings.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import date
from pathlib import Path

from scalemine import __version__
from scalemine.config import RunConfig
from scalemine.errors import (
    ConfigError,
    DegenerateStatisticsError,
    EmptyCommitStreamError,
    InsufficientDataError,
    MiningError,
    RecordFormatError,
)
from scalemine.experiments import (
    DatasetManifest,
    MethodVariant,
    analyze_project,
    cross_apply,
    drop_first_period_comparison,
    p_filter_comparison,
    project_period_fits,
    records_dir_loader,
    superlinearity_summary,
    sweep_front_load_days,
)
from scalemine.mining import mine_locator
from scalemine.records import persist_records
from scalemine.reports import (
    read_crosstable_csv,
    read_scaling_csv,
    svg_bar_chart,
    svg_histogram,
    write_compare_csv,
    write_crosstable_csv,
    write_differences_csv,
    write_histogram_csv,
    write_periods_csv,
    write_scaling_csv,
    write_superlinearity_csv,
    write_sweep_csv,
    write_sweep_summary_csv,
    write_text,
)
from scalemine.stats import ks_two_sample


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError as exc:
        raise ConfigError(f"bad date {text!r}: expected YYYY-MM-DD") from exc


def _parse_grid(text: str) -> list[int]:
    """Comma list ("0,30,60") or inclusive range ("0:720:30")."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                start, stop, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                start, stop, step = parts
            else:
                raise ValueError("expected start:stop[:step]")
            if step <= 0:
                raise ValueError("step must be positive")
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "manifest", None):
        cfg.manifests = list(args.manifest)
    if getattr(args, "records_dir", None):
        cfg.records_dir = args.records_dir
    if getattr(args, "method", None):
        cfg.methods = list(args.method)
    if getattr(args, "measure", None):
        cfg.measure = args.measure
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    if getattr(args, "jobs", None):
        cfg.jobs = args.jobs
    if getattr(args, "grid", None):
        cfg.front_load_grid = _parse_grid(args.grid)
    cfg.validate()
    return cfg


def _load_datasets(cfg: RunConfig) -> list[DatasetManifest]:
    if not cfg.manifests:
        raise ConfigError("no dataset manifests configured (use --manifest or --config)")
    return [DatasetManifest.load(path) for path in cfg.manifests]


def _first_variant(variants: list[MethodVariant], method: str) -> MethodVariant | None:
    for variant in variants:
        if variant.method == method:
            return variant
    return None


def cmd_mine(args: argparse.Namespace) -> int:
    cutoff = _parse_date(args.cutoff)
    records, report = mine_locator(args.repo, cutoff, project=args.project)
    out = Path(args.out)
    persist_records(records, out)
    report_path = Path(str(out) + ".report.json")
    with report_path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(records)} commit records to {out}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    datasets = _load_datasets(cfg)
    variants = cfg.variants()
    loader = records_dir_loader(cfg.records_dir)
    result = cross_apply(datasets, variants, loader, jobs=cfg.jobs)
    out = Path(cfg.out_dir)
    for dataset in datasets:
        write_scaling_csv(out / dataset.name / "scaling.csv", result.by_dataset[dataset.name])
    # Period-level detail is emitted for the first per-period variant
    # in the configured method order.
    base = _first_variant(variants, "sornette")
    if base is not None:
        for dataset in datasets:
            pairs = []
            for entry in dataset.projects:
                records = loader(entry)
                if records is not None:
                    pairs.append((entry.id, records))
            write_periods_csv(
                out / dataset.name / "periods.csv", project_period_fits(pairs, base)
            )
    write_crosstable_csv(out / "crosstable.csv", result.table)
    n_projects = sum(len(d.projects) for d in datasets)
    print(f"analyzed {n_projects} projects x {len(variants)} variants into {out}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    datasets = _load_datasets(cfg)
    loader = records_dir_loader(cfg.records_dir)
    scholtes = _first_variant(cfg.variants(), "scholtes")
    model = scholtes.model if scholtes is not None else "loglog"
    out = Path(cfg.out_dir)
    sweeps = {}
    for dataset in datasets:
        projects = [(entry.id, loader(entry) or []) for entry in dataset.projects]
        sweep = sweep_front_load_days(
            projects,
            cfg.front_load_grid,
            model=model,
            outlier_fraction=cfg.outlier_fraction,
            filter_one_timers=cfg.filter_one_timers,
        )
        sweeps[dataset.name] = sweep
        write_sweep_csv(out / dataset.name / "sweep.csv", sweep)
    write_sweep_summary_csv(out / "sweep_summary.csv", sweeps)
    print(f"swept {len(cfg.front_load_grid)} grid points into {out}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    datasets = _load_datasets(cfg)
    variants = cfg.variants()
    loader = records_dir_loader(cfg.records_dir)
    rows = []

    sornette = _first_variant(variants, "sornette")
    if sornette is not None:
        pooled_fits = []
        for dataset in datasets:
            pairs = []
            for entry in dataset.projects:
                records = loader(entry)
                if records is not None:
                    pairs.append((entry.id, records))
            fits = project_period_fits(pairs, sornette)
            pooled_fits.extend(
                (f"{dataset.name}/{project}", f) for project, f in fits
            )
            threshold = sornette.p_threshold if sornette.p_threshold is not None else 0.01
            comparison = p_filter_comparison(fits, threshold)
            rows.append(
                (f"p_filter/{dataset.name}", comparison.test,
                 len(comparison.projects), comparison.mean_relative_change)
            )
            drop = drop_first_period_comparison(fits, sornette.p_threshold)
            rows.append(
                (f"drop_first_period/{dataset.name}", drop.test,
                 len(drop.projects), None)
            )
        if len(datasets) > 1:
            threshold = sornette.p_threshold if sornette.p_threshold is not None else 0.01
            comparison = p_filter_comparison(pooled_fits, threshold)
            rows.append(
                ("p_filter/pooled", comparison.test,
                 len(comparison.projects), comparison.mean_relative_change)
            )
            drop = drop_first_period_comparison(pooled_fits, sornette.p_threshold)
            rows.append(("drop_first_period/pooled", drop.test, len(drop.projects), None))

    # Cross-dataset distribution comparison of each method's coefficient.
    for method in ("sornette", "scholtes"):
        variant = _first_variant(variants, method)
        if variant is None or len(datasets) < 2:
            continue
        coefficients = {}
        for dataset in datasets:
            values = []
            for entry in dataset.projects:
                records = loader(entry)
                if records is None:
                    continue
                scaling = analyze_project(entry.id, records, variant)
                if scaling.coefficient is not None:
                    values.append(scaling.coefficient)
            coefficients[dataset.name] = values
        names = sorted(coefficients)
        for i, name_a in enumerate(names):
            for name_b in names[i + 1:]:
                if not coefficients[name_a] or not coefficients[name_b]:
                    logging.getLogger(__name__).warning(
                        "skipping ks_%s %s vs %s: a side has no determined projects",
                        method, name_a, name_b,
                    )
                    continue
                outcome = ks_two_sample(coefficients[name_a], coefficients[name_b])
                rows.append(
                    (f"ks_{method}/{name_a}-vs-{name_b}", outcome,
                     outcome.n_effective, None)
                )

    if not rows:
        raise ConfigError("nothing to compare: no applicable method variants")
    out = Path(cfg.out_dir)
    write_compare_csv(out / "compare.csv", rows)
    print(f"wrote {len(rows)} comparisons to {out / 'compare.csv'}")
    return 0


def _pick_home(datasets: list[str], needle: str, override: str | None) -> str | None:
    if override:
        if override not in datasets:
            raise ConfigError(f"unknown dataset {override!r}; have {datasets}")
        return override
    for name in datasets:
        if needle in name.lower():
            return name
    return datasets[0] if datasets else None


def _variant_labels(
    table_labels: list[str], configured: list[str]
) -> tuple[str | None, str | None]:
    """(original, adjusted) labels for one method: configured order
    first, falling back to the sorted labels present in the table."""
    present = [label for label in configured if label in table_labels]
    for label in sorted(table_labels):
        if label not in present:
            present.append(label)
    original = present[0] if present else None
    adjusted = present[1] if len(present) > 1 else None
    return original, adjusted


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = Path(cfg.out_dir)
    crosstable_path = out / "crosstable.csv"
    if not crosstable_path.exists():
        raise ConfigError(f"missing {crosstable_path}; run analyze first")
    table = read_crosstable_csv(crosstable_path)
    datasets = sorted({dataset for _, _, dataset in table.cells})

    configured: dict[str, list[str]] = {"sornette": [], "scholtes": []}
    for variant in cfg.variants():
        configured[variant.method].append(variant.label)
    labels: dict[str, tuple[str | None, str | None]] = {}
    for method in ("sornette", "scholtes"):
        in_table = sorted({v for m, v, _ in table.cells if m == method})
        labels[method] = _variant_labels(in_table, configured[method])

    sornette_home = _pick_home(datasets, "sornette", args.sornette_home)
    scholtes_home = _pick_home(datasets, "scholtes", args.scholtes_home)
    summary = superlinearity_summary(
        table,
        sornette_original=labels["sornette"][0] or "",
        sornette_adjusted=labels["sornette"][1],
        scholtes_original=labels["scholtes"][0],
        scholtes_adjusted=labels["scholtes"][1],
        sornette_home=sornette_home,
        scholtes_home=scholtes_home,
    )
    write_superlinearity_csv(out / "superlinearity.csv", summary, table)
    write_differences_csv(out / "differences.csv", summary)

    # Bar chart: percent superlinear per (method, dataset) under each
    # method's primary variant.
    bar_labels = []
    bar_values = []
    for method in ("sornette", "scholtes"):
        original = labels[method][0]
        if original is None:
            continue
        for dataset in datasets:
            cell = table.cells.get((method, original, dataset))
            if cell is None:
                continue
            bar_labels.append(f"{method}\n{dataset}")
            bar_values.append(cell.percent_superlinear())
    write_text(
        out / "superlinearity.svg",
        svg_bar_chart(bar_labels, bar_values, "Superlinear projects (percent of determined)"),
    )

    # Histograms of the coefficient distributions, one file per method,
    # one series per dataset, from the per-dataset scaling files.
    for method in ("sornette", "scholtes"):
        original = labels[method][0]
        if original is None:
            continue
        series = {}
        for dataset in datasets:
            path = out / dataset / "scaling.csv"
            if not path.exists():
                continue
            values = [
                s.coefficient
                for s in read_scaling_csv(path)
                if s.method == method and s.variant == original
                and s.coefficient is not None
            ]
            if values:
                series[dataset] = values
        if not series:
            continue
        name = "average beta" if method == "sornette" else "alpha3"
        write_histogram_csv(out / f"histogram_{method}.csv", series)
        write_text(
            out / f"histogram_{method}.svg",
            svg_histogram(series, f"Distribution of {name} ({method})"),
        )
    print(f"wrote report files to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scalemine",
        description="Mine git histories and measure team-size vs productivity scaling.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON run configuration file")
    common.add_argument("--jobs", type=int, metavar="N", help="parallel project workers")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument(
        "--manifest", action="append", metavar="FILE",
        help="dataset manifest JSON (repeatable)",
    )
    inputs.add_argument(
        "--records-dir", metavar="DIR",
        help="directory holding <project-id>.jsonl record files",
    )
    inputs.add_argument(
        "--method", action="append", metavar="SPEC",
        help="method spec such as sornette, sornette:nofilter, "
             "scholtes:loglin, scholtes:fld=330 (repeatable)",
    )
    inputs.add_argument(
        "--measure", choices=["file_edits", "levenshtein"],
        help="override the per-method default output measure",
    )

    out_dir = argparse.ArgumentParser(add_help=False)
    out_dir.add_argument("--out", metavar="DIR", help="output directory")

    p_mine = sub.add_parser(
        "mine", parents=[common],
        help="extract commit records from a git repository",
    )
    p_mine.add_argument("repo", help="repository path or URL")
    p_mine.add_argument(
        "--cutoff", required=True, metavar="YYYY-MM-DD",
        help="last day of history to include (whole day, UTC)",
    )
    p_mine.add_argument(
        "--out", required=True, metavar="FILE", help="record file to write"
    )
    p_mine.add_argument(
        "--project", metavar="ID",
        help="project id for the mining report (default: repository name)",
    )
    p_mine.set_defaults(func=cmd_mine)

    p_analyze = sub.add_parser(
        "analyze", parents=[common, inputs, out_dir],
        help="fit scaling coefficients for every project and variant",
    )
    p_analyze.set_defaults(func=cmd_analyze)

    p_sweep = sub.add_parser(
        "sweep", parents=[common, inputs, out_dir],
        help="sweep the front-load cut over a day grid",
    )
    p_sweep.add_argument(
        "--grid", metavar="SPEC",
        help="day grid as a comma list (0,30,60) or range (0:720:30)",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_compare = sub.add_parser(
        "compare", parents=[common, inputs, out_dir],
        help="run paired and cross-dataset significance tests",
    )
    p_compare.set_defaults(func=cmd_compare)

    p_report = sub.add_parser(
        "report", parents=[common, out_dir],
        help="render SVG charts and summary CSVs from analyze outputs",
    )
    p_report.add_argument(
        "--sornette-home", metavar="DATASET",
        help="dataset treated as the per-period method's own sample",
    )
    p_report.add_argument(
        "--scholtes-home", metavar="DATASET",
        help="dataset treated as the whole-history method's own sample",
    )
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MiningError, RecordFormatError, EmptyCommitStreamError,
            FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateStatisticsError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
