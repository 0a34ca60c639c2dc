"""Ordinary least squares fits and project-level scaling statistics.

All log transforms use the natural log. The two-sided p-value for the
slope (null hypothesis: slope is zero) comes from the Student
t-distribution with n-2 degrees of freedom, evaluated through a
continued-fraction regularized incomplete beta with absolute error
below 1e-10 so that p-filter decisions near the 0.01 boundary are
reproducible across platforms.

Conventions:

* Perfect fits (zero residual, nonzero slope) report stderr 0 and
  p-value 0; they pass any p filter.
* A zero t-statistic reports p-value exactly 1.
* A coefficient exactly on its classification boundary counts as
  sublinear; "superlinear" requires strict excess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scalemine.errors import InsufficientDataError
from scalemine.windows import PeriodSamples, WindowSample

MIN_REGRESSION_POINTS = 3

_CF_EPS = 3e-16
_CF_MAX_ITER = 500
_CF_TINY = 1e-300


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    stderr_slope: float
    p_value: float
    r_value: float
    n_points: int


@dataclass(frozen=True)
class PeriodFit:
    """Log-log slope of one 250-day period."""

    period_index: int
    beta: float
    p_value: float
    n_windows: int


@dataclass(frozen=True)
class ProjectScaling:
    """Per-project scaling verdict for one method and variant."""

    project: str
    method: str
    variant: str
    coefficient: float | None
    classification: str
    n_points: int
    period_fits: tuple[PeriodFit, ...] = ()

    @property
    def period_betas(self) -> list[tuple[float, float]]:
        return [(f.beta, f.p_value) for f in self.period_fits]


@dataclass(frozen=True)
class EffectiveTeamSize:
    """Entropy-based count of equally-contributing members."""

    n_effective: float
    member_count: int
    shares: tuple[float, ...]


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def betainc_regularized(a: float, b: float, x: float, xc: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    `xc` may supply 1-x computed without cancellation for x near 1.
    """
    if xc is None:
        xc = 1.0 - x
    if x <= 0.0:
        return 0.0
    if xc <= 0.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(xc)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, xc) / b


def student_t_two_sided_p(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t with df degrees of
    freedom: P(|T| >= |t|)."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if t == 0.0:
        return 1.0
    t2 = t * t
    x = df / (df + t2)
    xc = t2 / (df + t2)
    p = betainc_regularized(df / 2.0, 0.5, x, xc)
    return min(max(p, 0.0), 1.0)


def ols_fit(points: Sequence[tuple[float, float]]) -> RegressionResult:
    """Least-squares line fit with a two-sided slope t-test.

    Requires at least 3 points with non-identical x values; raises
    InsufficientDataError otherwise (callers treat that as an
    undetermined project, never fatal).
    """
    n = len(points)
    if n < MIN_REGRESSION_POINTS:
        raise InsufficientDataError(f"insufficient data: {n} points, need 3")
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    if min(xs) == max(xs):
        raise InsufficientDataError("insufficient data: all x values identical")
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    syy = math.fsum((y - ybar) ** 2 for y in ys)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    ss_res = max(syy - slope * sxy, 0.0)
    r_value = sxy / math.sqrt(sxx * syy) if syy > 0.0 else 0.0
    df = n - 2
    if ss_res == 0.0:
        # Zero residual: the slope is either exactly zero (flat data,
        # t = 0) or infinitely many standard errors from zero.
        stderr = 0.0
        p_value = 1.0 if slope == 0.0 else 0.0
    else:
        stderr = math.sqrt(ss_res / df / sxx)
        t = slope / stderr
        p_value = student_t_two_sided_p(t, df)
    return RegressionResult(
        slope=slope,
        intercept=intercept,
        stderr_slope=stderr,
        p_value=p_value,
        r_value=r_value,
        n_points=n,
    )


def fit_sornette_periods(periods: Sequence[PeriodSamples]) -> list[PeriodFit]:
    """Fit ln(output) on ln(team_size) per period.

    Periods with fewer than 3 samples or degenerate team sizes are
    skipped; they contribute no slope.
    """
    fits: list[PeriodFit] = []
    for period in periods:
        points = [(math.log(s.team_size), math.log(s.output)) for s in period.samples]
        try:
            result = ols_fit(points)
        except InsufficientDataError:
            continue
        fits.append(
            PeriodFit(
                period_index=period.period_index,
                beta=result.slope,
                p_value=result.p_value,
                n_windows=result.n_points,
            )
        )
    return fits


def average_beta(
    fits: Sequence[PeriodFit], p_threshold: float | None
) -> tuple[float | None, list[PeriodFit]]:
    """Mean slope over periods passing the p filter (all, if no
    threshold). Undetermined (None) when the filter excludes every
    period."""
    if p_threshold is None:
        eligible = list(fits)
    else:
        eligible = [f for f in fits if f.p_value < p_threshold]
    if not eligible:
        return None, []
    return math.fsum(f.beta for f in eligible) / len(eligible), eligible


def classify(coefficient: float | None, method: str) -> str:
    """Scaling verdict: the boundary itself classifies as sublinear."""
    if method not in ("sornette", "scholtes"):
        raise ValueError(f"unknown method {method!r}")
    if coefficient is None:
        return "undetermined"
    boundary = 1.0 if method == "sornette" else 0.0
    return "superlinear" if coefficient > boundary else "sublinear"


def sornette_average_beta(
    periods: Sequence[PeriodSamples],
    p_threshold: float | None = 0.01,
    project: str = "",
    variant: str = "",
) -> ProjectScaling:
    """Project verdict from per-period log-log slopes."""
    fits = fit_sornette_periods(periods)
    coefficient, used = average_beta(fits, p_threshold)
    return ProjectScaling(
        project=project,
        method="sornette",
        variant=variant,
        coefficient=coefficient,
        classification=classify(coefficient, "sornette"),
        n_points=len(used),
        period_fits=tuple(fits),
    )


def scholtes_alpha3(
    samples: Sequence[WindowSample],
    model: str = "loglog",
    project: str = "",
    variant: str = "",
) -> ProjectScaling:
    """Single whole-history regression of (log) productivity on (log or
    plain) team size."""
    if model not in ("loglog", "loglin"):
        raise ValueError(f"unknown model {model!r}")
    points = []
    for s in samples:
        x = math.log(s.team_size) if model == "loglog" else float(s.team_size)
        points.append((x, math.log(s.productivity)))
    try:
        result = ols_fit(points)
    except InsufficientDataError:
        return ProjectScaling(
            project=project,
            method="scholtes",
            variant=variant,
            coefficient=None,
            classification="undetermined",
            n_points=0,
        )
    return ProjectScaling(
        project=project,
        method="scholtes",
        variant=variant,
        coefficient=result.slope,
        classification=classify(result.slope, "scholtes"),
        n_points=result.n_points,
    )


def effective_team_size(work: Sequence[float]) -> EffectiveTeamSize:
    """Entropy-based effective team size 2**H of a work distribution.

    Equals the member count exactly when all members contribute the
    same amount; zero-work members lower it (0*log0 taken as 0).
    """
    if not work:
        raise ValueError("work distribution is empty")
    if any(w < 0 for w in work):
        raise ValueError("work values must be non-negative")
    total = math.fsum(work)
    if total <= 0:
        raise ValueError("all-zero work distribution")
    shares = tuple(w / total for w in work)
    entropy = -math.fsum(f * math.log2(f) for f in shares if f > 0)
    return EffectiveTeamSize(
        n_effective=2.0**entropy,
        member_count=len(work),
        shares=shares,
    )
