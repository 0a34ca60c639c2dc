"""Windowing of commit streams into regression data points.

Two schemes are supported:

* Periods of 250 days, each subdivided into 50 windows of 5 days. Team
  size and output are both computed over the same 5-day window. Each
  period later receives its own regression.
* Consecutive 7-day output windows over the whole history, with team
  size taken from a trailing 295-day window ending at each output
  window's end. Team windows overlap, so one commit contributes
  authorship to up to ceil(295/7) = 43 consecutive windows but is
  counted in exactly one output window.

Window boundaries are whole-second offsets from the first commit's
timestamp; there is no calendar alignment. Windows with zero output or
zero team size are omitted because the regressions run in log space.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Sequence

from scalemine.errors import EmptyCommitStreamError
from scalemine.records import CommitRecord, measure_value

DAY_SECONDS = 86400
SORNETTE_PERIOD_DAYS = 250
SORNETTE_WINDOW_DAYS = 5
SORNETTE_WINDOWS_PER_PERIOD = SORNETTE_PERIOD_DAYS // SORNETTE_WINDOW_DAYS
SCHOLTES_OUTPUT_DAYS = 7
SCHOLTES_TEAM_DAYS = 295

# Trailing partial periods with fewer emitted samples are dropped: a
# regression needs 3 points anyway, so one-sample tails are useless.
MIN_TRAILING_PERIOD_SAMPLES = 2


@dataclass(frozen=True)
class WindowSample:
    """One regression data point.

    `team_window_start` equals `window_start` when team size and output
    share the window, and lies up to 295 days earlier for the trailing
    team-size scheme.
    """

    window_start: datetime
    window_end: datetime
    team_window_start: datetime
    team_size: int
    output: float

    @property
    def productivity(self) -> float:
        return self.output / self.team_size


@dataclass(frozen=True)
class PeriodSamples:
    """Samples of one 250-day period (50 candidate 5-day windows)."""

    period_index: int
    period_start: datetime
    period_end: datetime
    samples: tuple[WindowSample, ...]


def _offsets(records: Sequence[CommitRecord]) -> list[int]:
    first = records[0].timestamp
    return [int((r.timestamp - first).total_seconds()) for r in records]


def _require_records(records: Sequence[CommitRecord]) -> None:
    if not records:
        raise EmptyCommitStreamError("no commit records to window")


def build_sornette_periods(
    records: Sequence[CommitRecord], measure: str = "file_edits"
) -> list[PeriodSamples]:
    """Tile the history into 250-day periods of 5-day window samples.

    Records must be sorted ascending. Team size and output are computed
    over the same 5-day window; empty windows are omitted. The trailing
    partial period is kept only when it has at least 2 emitted samples.
    """
    _require_records(records)
    first = records[0].timestamp
    offsets = _offsets(records)
    window_seconds = SORNETTE_WINDOW_DAYS * DAY_SECONDS
    period_seconds = SORNETTE_PERIOD_DAYS * DAY_SECONDS

    # Bucket commits by global 5-day window index.
    window_outputs: dict[int, float] = {}
    window_authors: dict[int, set[str]] = {}
    for record, off in zip(records, offsets):
        g = off // window_seconds
        window_outputs[g] = window_outputs.get(g, 0.0) + measure_value(record, measure)
        window_authors.setdefault(g, set()).add(record.author_email)

    n_periods = offsets[-1] // period_seconds + 1
    periods: list[PeriodSamples] = []
    for k in range(n_periods):
        start_off = k * period_seconds
        samples = []
        for j in range(SORNETTE_WINDOWS_PER_PERIOD):
            g = k * SORNETTE_WINDOWS_PER_PERIOD + j
            output = window_outputs.get(g, 0.0)
            authors = window_authors.get(g)
            if output <= 0 or not authors:
                continue
            w_start = first + timedelta(seconds=start_off + j * window_seconds)
            w_end = first + timedelta(seconds=start_off + (j + 1) * window_seconds)
            samples.append(
                WindowSample(
                    window_start=w_start,
                    window_end=w_end,
                    team_window_start=w_start,
                    team_size=len(authors),
                    output=output,
                )
            )
        is_trailing = k == n_periods - 1
        if is_trailing and len(samples) < MIN_TRAILING_PERIOD_SAMPLES:
            continue
        periods.append(
            PeriodSamples(
                period_index=k,
                period_start=first + timedelta(seconds=start_off),
                period_end=first + timedelta(seconds=start_off + period_seconds),
                samples=tuple(samples),
            )
        )
    return periods


def build_scholtes_samples(
    records: Sequence[CommitRecord], measure: str = "levenshtein"
) -> list[WindowSample]:
    """Build 7-day output windows with trailing 295-day team windows.

    Records must be sorted ascending. The team window is truncated at
    the first commit when fewer than 295 days of history exist; early
    samples are emitted rather than suppressed.
    """
    _require_records(records)
    first = records[0].timestamp
    offsets = _offsets(records)
    out_seconds = SCHOLTES_OUTPUT_DAYS * DAY_SECONDS
    team_seconds = SCHOLTES_TEAM_DAYS * DAY_SECONDS

    n_windows = offsets[-1] // out_seconds + 1
    samples: list[WindowSample] = []
    for g in range(n_windows):
        out_start = g * out_seconds
        out_end = (g + 1) * out_seconds
        lo = bisect.bisect_left(offsets, out_start)
        hi = bisect.bisect_left(offsets, out_end)
        output = sum(measure_value(records[i], measure) for i in range(lo, hi))
        if output <= 0:
            continue
        team_start = max(out_end - team_seconds, 0)
        t_lo = bisect.bisect_left(offsets, team_start)
        authors = {records[i].author_email for i in range(t_lo, hi)}
        if not authors:
            continue
        samples.append(
            WindowSample(
                window_start=first + timedelta(seconds=out_start),
                window_end=first + timedelta(seconds=out_end),
                team_window_start=first + timedelta(seconds=team_start),
                team_size=len(authors),
                output=output,
            )
        )
    return samples


def filter_one_time_contributors(records: Sequence[CommitRecord]) -> list[CommitRecord]:
    """Drop commits by authors with exactly one commit in the range.

    Single pass: authors left with one commit by the removal of others
    are retained.
    """
    counts: dict[str, int] = {}
    for record in records:
        counts[record.author_email] = counts.get(record.author_email, 0) + 1
    return [r for r in records if counts[r.author_email] >= 2]


def apply_front_load_filter(
    records: Sequence[CommitRecord], days: int
) -> list[CommitRecord]:
    """Drop commits within `days` of the first commit.

    Downstream windowing treats the first surviving commit as the new
    origin automatically.
    """
    if days < 0:
        raise ValueError("front-load days must be non-negative")
    if not records or days == 0:
        return list(records)
    cut = records[0].timestamp + timedelta(days=days)
    return [r for r in records if r.timestamp >= cut]


def trim_levenshtein_outliers(
    records: Sequence[CommitRecord], fraction: float = 0.025
) -> list[CommitRecord]:
    """Remove the floor(fraction*n) smallest and largest commits by
    total edit distance; ties broken by commit hash.

    The surviving records keep their original order.
    """
    if not 0 <= fraction < 0.5:
        raise ValueError(f"trim fraction must be in [0, 0.5), got {fraction}")
    n = len(records)
    k = int(fraction * n)
    if k == 0:
        return list(records)
    ranked = sorted(records, key=lambda r: (r.total_edit_distance, r.commit_id))
    dropped = {id(r) for r in ranked[:k]} | {id(r) for r in ranked[n - k :]}
    return [r for r in records if id(r) not in dropped]
