"""Nonparametric tests for comparing coefficient distributions.

The signed-rank test is exact (full sign-assignment distribution) up to
25 nonzero pairs and uses the tie- and continuity-corrected normal
approximation beyond that. The two-sample Kolmogorov-Smirnov p-value
uses the asymptotic Kolmogorov distribution with effective sample size
n*m/(n+m).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from scalemine.errors import DegenerateStatisticsError

WILCOXON_EXACT_LIMIT = 25


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    p_value: float
    n_effective: int
    method_note: str  # "exact" | "approximate"


def _midranks_doubled(values: Sequence[float]) -> list[int]:
    """Ranks of |values| with midrank ties, scaled by 2 so they stay
    integral (a midrank is always a multiple of 0.5)."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    doubled = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # Tied block occupies 1-based ranks i+1..j+1; midrank*2 = i+j+2.
        rank2 = i + j + 2
        for k in range(i, j + 1):
            doubled[order[k]] = rank2
        i = j + 1
    return doubled


def _exact_count_le(doubled_ranks: Sequence[int], bound: int) -> int:
    """Number of sign assignments whose positive-rank sum is <= bound.

    Computed by convolving the rank-sum distribution with exact integer
    counts; identical to enumerating all 2**n assignments.
    """
    total = sum(doubled_ranks)
    bound = min(bound, total)
    if bound < 0:
        return 0
    counts = [0] * (total + 1)
    counts[0] = 1
    reached = 0
    for r in doubled_ranks:
        reached = min(reached + r, total)
        for s in range(reached, r - 1, -1):
            counts[s] += counts[s - r]
    return sum(counts[: bound + 1])


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilcoxon_signed_rank(pairs: Sequence[tuple[float, float]]) -> TestOutcome:
    """Two-sided Wilcoxon signed-rank test on paired values.

    Zero differences are dropped (standard convention); raises
    DegenerateStatisticsError when no nonzero difference remains. The
    statistic is min(W+, W-).
    """
    diffs = [a - b for a, b in pairs if a != b]
    n = len(diffs)
    if n == 0:
        raise DegenerateStatisticsError("degenerate pairs: all differences are zero")
    magnitudes = [abs(d) for d in diffs]
    doubled = _midranks_doubled(magnitudes)
    w_plus2 = sum(r for r, d in zip(doubled, diffs) if d > 0)
    w_minus2 = sum(r for r, d in zip(doubled, diffs) if d < 0)
    statistic2 = min(w_plus2, w_minus2)
    statistic = statistic2 / 2.0

    if n <= WILCOXON_EXACT_LIMIT:
        count = _exact_count_le(doubled, statistic2)
        p = min(1.0, 2.0 * count / 2.0**n)
        return TestOutcome(statistic, p, n, "exact")

    mean = n * (n + 1) / 4.0
    tie_groups: dict[int, int] = {}
    for r in doubled:
        tie_groups[r] = tie_groups.get(r, 0) + 1
    tie_term = sum(t**3 - t for t in tie_groups.values()) / 48.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    se = math.sqrt(variance)
    diff = statistic - mean
    correction = 0.5 * (1 if diff > 0 else -1 if diff < 0 else 0)
    z = (diff - correction) / se
    p = min(1.0, 2.0 * _normal_sf(abs(z)))
    return TestOutcome(statistic, p, n, "approximate")


def _ecdf_gaps(a: list[float], b: list[float]) -> float:
    """sup |ECDF_a - ECDF_b| over all observed values (sorted inputs)."""
    d = 0.0
    n, m = len(a), len(b)
    for v in a + b:
        fa = bisect.bisect_right(a, v) / n
        fb = bisect.bisect_right(b, v) / m
        gap = abs(fa - fb)
        if gap > d:
            d = gap
    return d


def kolmogorov_sf(x: float) -> float:
    """Survival function of the Kolmogorov distribution,
    Q(x) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)."""
    if x <= 0.0:
        return 1.0
    if x < 0.5:
        # Dual (theta-function) series converges fast for small x.
        factor = math.sqrt(2.0 * math.pi) / x
        cdf = 0.0
        k = 1
        while k < 200:
            term = math.exp(-((k * math.pi) ** 2) / (8.0 * x * x))
            cdf += term
            if term < 1e-18:
                break
            k += 2
        return min(max(1.0 - factor * cdf, 0.0), 1.0)
    total = 0.0
    sign = 1.0
    for k in range(1, 200):
        term = math.exp(-2.0 * k * k * x * x)
        total += sign * term
        if term < 1e-18:
            break
        sign = -sign
    return min(max(2.0 * total, 0.0), 1.0)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> TestOutcome:
    """Two-sample Kolmogorov-Smirnov test.

    Statistic D is the exact supremum ECDF gap; the p-value is
    asymptotic, so method_note is always "approximate".
    """
    if not a or not b:
        raise DegenerateStatisticsError("empty sample for KS test")
    sa = sorted(float(v) for v in a)
    sb = sorted(float(v) for v in b)
    d = _ecdf_gaps(sa, sb)
    n, m = len(sa), len(sb)
    effective = n * m / (n + m)
    p = kolmogorov_sf(math.sqrt(effective) * d)
    return TestOutcome(d, p, n + m, "approximate")
