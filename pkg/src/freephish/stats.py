"""Rank and t statistics used by the measurement and reporting modules.

Self-contained implementations: Mann-Whitney U with the tie-corrected normal
approximation, and the paired t test with its p-value computed through the
regularized incomplete beta function (Lentz continued fraction). p-values are
clamped at 1e-12; format_p renders clamped values as "<1e-12".
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from datetime import timedelta

P_FLOOR = 1e-12


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> tuple[float, float]:
    """U statistic of the first sample and the two-sided asymptotic p.

    Midranks handle ties; the normal approximation uses the tie-corrected
    variance and no continuity correction. When every value is tied the
    variance is zero and p is 1.0 by convention.
    """
    n1, n2 = len(sample_a), len(sample_b)
    if n1 < 2 or n2 < 2:
        raise ValueError("both samples must have at least 2 observations")
    combined = list(sample_a) + list(sample_b)
    ranks = _midranks(combined)
    r1 = sum(ranks[:n1])
    u = r1 - n1 * (n1 + 1) / 2.0

    n = n1 + n2
    tie_term = 0.0
    seen: dict[float, int] = {}
    for v in combined:
        seen[v] = seen.get(v, 0) + 1
    for count in seen.values():
        tie_term += count ** 3 - count
    var = (n1 * n2 / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return u, 1.0
    z = (u - n1 * n2 / 2.0) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return u, min(1.0, max(p, P_FLOOR))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter = 300
    eps = 3e-14
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
              + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(log_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t."""
    if df < 1:
        raise ValueError("df must be >= 1")
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


@dataclass(frozen=True)
class TTestResult:
    t: float | None
    p: float | None
    degenerate: bool = False


def paired_t_test(a: list[float], b: list[float]) -> TTestResult:
    """Paired t test on equal-length samples.

    Zero variance of the pairwise differences is a degenerate case and is
    flagged on the result rather than raised.
    """
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("need at least 2 pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        return TTestResult(t=None, p=None, degenerate=True)
    t = mean / math.sqrt(var / n)
    p = t_sf_two_sided(t, n - 1)
    return TTestResult(t=t, p=min(1.0, max(p, P_FLOOR)), degenerate=False)


def format_p(p: float | None) -> str:
    if p is None:
        return "n/a"
    if p <= P_FLOOR:
        return "<1e-12"
    return f"{p:.6g}"


def format_hhmm(delta: timedelta) -> str:
    """Render a duration as h:mm (e.g. 7:11); minutes are truncated."""
    total_minutes = int(delta.total_seconds() // 60)
    return f"{total_minutes // 60}:{total_minutes % 60:02d}"


def median_timedelta(values: list[timedelta]) -> timedelta:
    """Median with the even-count mean-of-middles rule."""
    if not values:
        raise ValueError("median of empty sequence")
    return statistics.median(values)
