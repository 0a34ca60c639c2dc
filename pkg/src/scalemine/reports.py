"""Deterministic CSV and SVG emission.

Plots are views over data that is always also written to a CSV, so
no number exists only inside an SVG. Numeric CSV cells use the
shortest round-trip decimal form; files use "\\n" line endings so
repeated runs are byte-identical on any platform.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from scalemine.errors import ConfigError
from scalemine.experiments import CellCounts, CrossTable, SuperlinearitySummary, SweepResult
from scalemine.regression import PeriodFit, ProjectScaling
from scalemine.stats import TestOutcome

HIST_LO = -1.5
HIST_HI = 2.5
HIST_BIN_WIDTH = 0.1
HIST_BINS = 40

SVG_PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377")


def format_cell(value) -> str:
    """Shortest round-trip text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def write_scaling_csv(path: str | Path, scalings: Sequence[ProjectScaling]) -> None:
    rows = sorted(
        (
            (s.project, s.method, s.variant, s.coefficient, s.classification, s.n_points)
            for s in scalings
        ),
        key=lambda r: (r[0], r[1], r[2]),
    )
    write_csv(
        path,
        ["project", "method", "variant", "coefficient", "classification", "n_points"],
        rows,
    )


def write_periods_csv(
    path: str | Path, fits_by_project: Sequence[tuple[str, Sequence[PeriodFit]]]
) -> None:
    rows = []
    for project, fits in sorted(fits_by_project, key=lambda item: item[0]):
        for fit in sorted(fits, key=lambda f: f.period_index):
            rows.append((project, fit.period_index, fit.beta, fit.p_value, fit.n_windows))
    write_csv(path, ["project", "period_index", "beta", "p_value", "n_windows"], rows)


def write_sweep_csv(path: str | Path, sweep: SweepResult) -> None:
    rows = []
    for project in sorted(sweep.per_project):
        values = sweep.per_project[project]
        for days, alpha3 in zip(sweep.grid, values):
            rows.append((project, days, alpha3, alpha3 is not None))
    write_csv(path, ["project", "front_load_days", "alpha3", "determined"], rows)


def write_sweep_summary_csv(
    path: str | Path, sweeps: Mapping[str, SweepResult]
) -> None:
    rows = []
    for dataset in sorted(sweeps):
        sweep = sweeps[dataset]
        for days, mean, count in zip(sweep.grid, sweep.mean_alpha3, sweep.determined_counts):
            rows.append((dataset, days, mean, count))
    write_csv(path, ["dataset", "front_load_days", "mean_alpha3", "n_determined"], rows)


def write_compare_csv(
    path: str | Path,
    rows: Sequence[tuple[str, TestOutcome, int, float | None]],
) -> None:
    """One row per experiment: (label, test outcome, pair count, mean
    relative change or None)."""
    out = [
        (label, outcome.statistic, outcome.p_value, n_pairs, mean_rel)
        for label, outcome, n_pairs, mean_rel in sorted(rows, key=lambda r: r[0])
    ]
    write_csv(
        path,
        ["experiment", "statistic", "p_value", "n_pairs", "mean_relative_change"],
        out,
    )


def write_crosstable_csv(path: str | Path, table: CrossTable) -> None:
    rows = [
        (method, variant, dataset, cell.sublinear, cell.superlinear,
         cell.undetermined, cell.total)
        for method, variant, dataset, cell in table.rows()
    ]
    write_csv(
        path,
        ["method", "variant", "dataset", "sublinear", "superlinear",
         "undetermined", "total"],
        rows,
    )


def write_superlinearity_csv(
    path: str | Path, summary: SuperlinearitySummary, table: CrossTable
) -> None:
    rows = []
    for (method, variant, dataset), pct in sorted(summary.percentages.items()):
        cell = table.cells[(method, variant, dataset)]
        rows.append((method, variant, dataset, pct, cell.determined))
    write_csv(
        path,
        ["method", "variant", "dataset", "percent_superlinear", "n_determined"],
        rows,
    )


def write_differences_csv(path: str | Path, summary: SuperlinearitySummary) -> None:
    order = ["original", "selection_adjusted", "method_adjusted", "both_adjusted"]
    rows = [(name, summary.differences.get(name)) for name in order]
    write_csv(path, ["comparison", "difference_percent"], rows)


def read_crosstable_csv(path: str | Path) -> CrossTable:
    """Inverse of write_crosstable_csv."""
    table = CrossTable()
    try:
        with Path(path).open("r", encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                try:
                    key = (row["method"], row["variant"], row["dataset"])
                    cell = CellCounts(
                        sublinear=int(row["sublinear"]),
                        superlinear=int(row["superlinear"]),
                        undetermined=int(row["undetermined"]),
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ConfigError(f"bad cross-table row in {path}: {row}") from exc
                table.cells[key] = cell
    except OSError as exc:
        raise ConfigError(f"cannot read cross table {path}: {exc}") from exc
    return table


def read_scaling_csv(path: str | Path) -> list[ProjectScaling]:
    """Inverse of write_scaling_csv (period detail is not recoverable)."""
    out = []
    try:
        with Path(path).open("r", encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                try:
                    out.append(
                        ProjectScaling(
                            project=row["project"],
                            method=row["method"],
                            variant=row["variant"],
                            coefficient=float(row["coefficient"]) if row["coefficient"] else None,
                            classification=row["classification"],
                            n_points=int(row["n_points"]),
                        )
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ConfigError(f"bad scaling row in {path}: {row}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read scaling file {path}: {exc}") from exc
    return out


def histogram_counts(values: Sequence[float]) -> list[int]:
    """Counts over the fixed coefficient bins; out-of-range values land
    in the nearest edge bin."""
    counts = [0] * HIST_BINS
    for v in values:
        idx = int(math.floor((v - HIST_LO) / HIST_BIN_WIDTH))
        counts[min(HIST_BINS - 1, max(0, idx))] += 1
    return counts


def bin_edges(index: int) -> tuple[float, float]:
    # Edges as exact tenths so the CSV shows -1.2 rather than float noise.
    return (index - 15) / 10, (index - 14) / 10


def write_histogram_csv(
    path: str | Path, series: Mapping[str, Sequence[float]]
) -> None:
    rows = []
    for name in sorted(series):
        counts = histogram_counts(series[name])
        for i, count in enumerate(counts):
            lo, hi = bin_edges(i)
            rows.append((name, lo, hi, count))
    write_csv(path, ["series", "bin_start", "bin_end", "count"], rows)


def _coord(v: float) -> str:
    return f"{v:.2f}"


def _svg_text(x: float, y: float, text: str, size: int = 11, anchor: str = "middle") -> str:
    return (
        f'<text x="{_coord(x)}" y="{_coord(y)}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}">{text}</text>'
    )


def _svg_rect(x: float, y: float, w: float, h: float, fill: str) -> str:
    return (
        f'<rect x="{_coord(x)}" y="{_coord(y)}" width="{_coord(w)}" '
        f'height="{_coord(h)}" fill="{fill}"/>'
    )


def _svg_line(x1: float, y1: float, x2: float, y2: float) -> str:
    return (
        f'<line x1="{_coord(x1)}" y1="{_coord(y1)}" x2="{_coord(x2)}" '
        f'y2="{_coord(y2)}" stroke="#333333" stroke-width="1"/>'
    )


def _svg_document(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def svg_histogram(series: Mapping[str, Sequence[float]], title: str) -> str:
    """Grouped-bar histogram over the fixed coefficient bins, one bar
    color per series."""
    width, height = 720, 360
    left, right, top, bottom = 55, 15, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    names = sorted(series)
    counts = {name: histogram_counts(series[name]) for name in names}
    max_count = max((max(c) for c in counts.values()), default=0)
    max_count = max(max_count, 1)
    y_step = max(1, math.ceil(max_count / 5))
    y_top = y_step * math.ceil(max_count / y_step)

    body = [_svg_text(width / 2, 20, title, size=14)]
    body.append(_svg_line(left, top, left, top + plot_h))
    body.append(_svg_line(left, top + plot_h, left + plot_w, top + plot_h))
    # y ticks
    tick = 0
    while tick <= y_top:
        y = top + plot_h - plot_h * tick / y_top
        body.append(_svg_line(left - 4, y, left, y))
        body.append(_svg_text(left - 8, y + 4, str(tick), anchor="end"))
        tick += y_step
    # x ticks every 0.5
    for i in range(0, HIST_BINS + 1, 5):
        x = left + plot_w * i / HIST_BINS
        body.append(_svg_line(x, top + plot_h, x, top + plot_h + 4))
        lo, _ = bin_edges(i) if i < HIST_BINS else (HIST_HI, HIST_HI)
        body.append(_svg_text(x, top + plot_h + 18, f"{lo:.1f}"))
    body.append(_svg_text(width / 2, height - 8, "coefficient"))
    # bars
    bin_w = plot_w / HIST_BINS
    bar_w = bin_w / max(1, len(names))
    for s_idx, name in enumerate(names):
        fill = SVG_PALETTE[s_idx % len(SVG_PALETTE)]
        for b_idx, count in enumerate(counts[name]):
            if count == 0:
                continue
            h = plot_h * count / y_top
            x = left + b_idx * bin_w + s_idx * bar_w
            body.append(_svg_rect(x, top + plot_h - h, bar_w, h, fill))
        # legend
        ly = top + 6 + 16 * s_idx
        body.append(_svg_rect(left + plot_w - 130, ly, 10, 10, fill))
        body.append(_svg_text(left + plot_w - 115, ly + 9, name, anchor="start"))
    return _svg_document(width, height, body)


def svg_bar_chart(
    labels: Sequence[str], values: Sequence[float | None], title: str,
    unit: str = "%",
) -> str:
    """Simple labeled bar chart; each bar's value is printed above it
    with two decimals."""
    width, height = 640, 360
    left, right, top, bottom = 55, 15, 40, 70
    plot_w = width - left - right
    plot_h = height - top - bottom
    v_max = max((v for v in values if v is not None), default=0.0)
    v_max = max(v_max, 1.0)
    body = [_svg_text(width / 2, 20, title, size=14)]
    body.append(_svg_line(left, top, left, top + plot_h))
    body.append(_svg_line(left, top + plot_h, left + plot_w, top + plot_h))
    n = max(1, len(labels))
    slot = plot_w / n
    bar_w = slot * 0.6
    for i, (label, value) in enumerate(zip(labels, values)):
        x = left + i * slot + (slot - bar_w) / 2
        cx = x + bar_w / 2
        if value is None:
            body.append(_svg_text(cx, top + plot_h - 6, "n/a"))
        else:
            h = plot_h * max(value, 0.0) / v_max
            fill = SVG_PALETTE[i % len(SVG_PALETTE)]
            body.append(_svg_rect(x, top + plot_h - h, bar_w, h, fill))
            body.append(_svg_text(cx, top + plot_h - h - 6, f"{value:.2f}{unit}"))
        for line_no, part in enumerate(label.split("\n")):
            body.append(_svg_text(cx, top + plot_h + 18 + 14 * line_no, part))
    return _svg_document(width, height, body)


def write_text(path: str | Path, content: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
