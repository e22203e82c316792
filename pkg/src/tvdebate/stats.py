"""Welch t-tests on an in-core Student-t distribution, and Fleiss' kappa."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection, Mapping, Sequence, Union

ONE_GREATER = "one_greater"
ONE_LESS = "one_less"
TWO = "two"
TAILS = (ONE_GREATER, ONE_LESS, TWO)


class StatsError(ValueError):
    pass


def _betacf(a: float, b: float, x: float, eps: float = 1e-16, max_iter: int = 10000) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    ``y`` may carry 1 - x computed without cancellation.
    """
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, y) / b


def t_tail(t: float, dof: float) -> float:
    """P(T > |t|) for Student's t with ``dof`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return 0.5 * betainc(dof / 2.0, 0.5, dof / (dof + t2), t2 / (dof + t2))


def t_sf(t: float, dof: float) -> float:
    """P(T >= t)."""
    tail = t_tail(t, dof)
    return tail if t > 0 else 1.0 - tail


def t_cdf(t: float, dof: float) -> float:
    tail = t_tail(t, dof)
    return 1.0 - tail if t > 0 else tail


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    dof: float
    p_value: float
    tail: str
    mean_a: float = math.nan
    mean_b: float = math.nan


def _mean_var(x: Sequence[float]) -> tuple[float, float]:
    n = len(x)
    m = math.fsum(x) / n
    return m, math.fsum((v - m) ** 2 for v in x) / (n - 1)


def welch_t(sample_a: Sequence[float], sample_b: Sequence[float], tail: str = TWO) -> TTestResult:
    if tail not in TAILS:
        raise StatsError(f"unknown tail {tail!r}")
    a, b = [float(v) for v in sample_a], [float(v) for v in sample_b]
    if len(a) < 2 or len(b) < 2:
        raise StatsError("insufficient-sample: each sample needs at least 2 values")
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    if va == 0 and vb == 0:
        raise StatsError("zero-variance-both")
    sa, sb = va / len(a), vb / len(b)
    se2 = sa + sb
    t = (ma - mb) / math.sqrt(se2)
    dof = se2 * se2 / (sa * sa / (len(a) - 1) + sb * sb / (len(b) - 1))
    # every tail comes from P(T > |t|) so that swapping the samples is exact
    upper = t_tail(t, dof)
    if tail == TWO:
        p = min(1.0, 2.0 * upper)
    elif (tail == ONE_GREATER) == (t > 0):
        p = upper
    else:
        p = 1.0 - upper
    return TTestResult(t, dof, p, tail, ma, mb)


def category_vs_rest(per_video_values: Mapping[str, float],
                     assignment: Mapping[str, Union[str, Collection[str]]],
                     category: str, tail: str = TWO) -> TTestResult:
    """Welch test of videos labelled ``category`` against all other videos.

    ``assignment`` maps a video to its major category, or to a collection
    of labels when minor categories should count as membership.
    """
    inside, rest = [], []
    for vid in sorted(per_video_values):
        labels = assignment.get(vid)
        member = labels == category if isinstance(labels, str) else (labels is not None and category in labels)
        (inside if member else rest).append(per_video_values[vid])
    return welch_t(inside, rest, tail)


def fleiss_kappa(ratings: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa for an items x categories matrix of rater counts."""
    rows = [list(map(int, r)) for r in ratings]
    if not rows:
        raise StatsError("no items")
    n = sum(rows[0])
    if n < 2 or any(sum(r) != n for r in rows):
        raise StatsError("unequal-rater-counts")
    N, k = len(rows), len(rows[0])
    p_bar = math.fsum((sum(c * c for c in r) - n) / (n * (n - 1)) for r in rows) / N
    p_j = [sum(r[j] for r in rows) / (N * n) for j in range(k)]
    p_e = math.fsum(p * p for p in p_j)
    if p_e == 1.0:
        raise StatsError("degenerate: expected agreement is 1")
    if p_bar == 1.0:
        return 1.0
    return (p_bar - p_e) / (1.0 - p_e)
