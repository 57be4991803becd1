"""Hypothesis tests and score summaries used by the analysis pipelines.

The p-value machinery (regularized incomplete beta and gamma) is
implemented here from the classic series / continued-fraction recipes and
converges to 1e-10, so the package carries no statistics dependency and
tests can compare it against an independent reference implementation.

All tests are two sided.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTestError, EmptyGroupError, SampleSizeError

_EPS = 1e-14
_MAX_ITER = 500
_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError(f"incomplete beta failed to converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), monotone in x, I_0 = 0 and I_1 = 1, accurate to 1e-10."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(log_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def regularized_lower_gamma(s: float, x: float) -> float:
    """P(s, x), the regularized lower incomplete gamma, accurate to 1e-10."""
    if s <= 0:
        raise ValueError(f"shape must be positive, got {s}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if x < s + 1.0:
        # Series representation.
        term = 1.0 / s
        total = term
        ap = s
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
        raise RuntimeError(f"lower gamma series failed to converge for s={s}, x={x}")
    # Continued fraction gives the upper tail.
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            q = math.exp(-x + s * math.log(x) - math.lgamma(s)) * h
            return 1.0 - q
    raise RuntimeError(f"upper gamma fraction failed to converge for s={s}, x={x}")


def chi_square_sf(x: float, df: float) -> float:
    """Upper tail of the chi-square distribution."""
    return 1.0 - regularized_lower_gamma(df / 2.0, x / 2.0)


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability of Student's t."""
    if df <= 0:
        raise ValueError(f"df must be positive, got {df}")
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test."""

    kind: str
    statistic: float
    df: float
    p_value: float
    n: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "n": self.n,
        }


def paired_t_test(a, b) -> TestResult:
    """Two-sided paired t-test.

    Parameters
    ----------
    a, b : array_like
        Paired observations, same length, at least two pairs.

    Returns
    -------
    TestResult
        ``statistic = mean(d) / (sd(d) / sqrt(n))`` with ``d = a - b`` and
        the sample standard deviation (ddof 1), ``df = n - 1``.

    Notes
    -----
    Identical inputs give t = 0, p = 1.  Differences with zero variance but
    a nonzero mean leave the statistic undefined and raise
    DegenerateTestError.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"paired samples must be equal-length vectors, got {a.shape} and {b.shape}")
    n = a.size
    if n < 2:
        raise SampleSizeError(f"paired t-test needs at least 2 pairs, got {n}")
    d = a - b
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return TestResult("paired_t", 0.0, df, 1.0, n)
        raise DegenerateTestError(
            "difference variance is zero with a nonzero mean; t is undefined"
        )
    t = mean / (sd / math.sqrt(n))
    return TestResult("paired_t", t, df, student_t_sf2(t, df), n)


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks from 1, ties sharing the mean of the ranks they span."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def kruskal_wallis(groups) -> TestResult:
    """Kruskal-Wallis H test across two or more independent groups.

    Mid-ranks resolve ties and the statistic is divided by the standard tie
    correction ``1 - sum(t^3 - t) / (N^3 - N)``.  The p-value comes from the
    chi-square upper tail with ``k - 1`` degrees of freedom.  When every
    observation is equal the statistic is defined as 0.
    """
    groups = [np.asarray(g, dtype=float) for g in groups]
    if len(groups) < 2:
        raise EmptyGroupError(f"need at least 2 groups, got {len(groups)}")
    for i, g in enumerate(groups):
        if g.size == 0:
            raise EmptyGroupError(f"group {i} is empty")
        if g.ndim != 1:
            raise ValueError(f"group {i} must be a vector, got shape {g.shape}")
    pooled = np.concatenate(groups)
    n_total = pooled.size
    ranks = _midranks(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r = ranks[start : start + g.size]
        h += r.sum() ** 2 / g.size
        start += g.size
    h = 12.0 / (n_total * (n_total + 1)) * h - 3.0 * (n_total + 1)
    _, counts = np.unique(pooled, return_counts=True)
    correction = 1.0 - float(np.sum(counts**3 - counts)) / (n_total**3 - n_total)
    df = len(groups) - 1
    if correction == 0.0:
        # Every observation identical: no rank variation at all.
        return TestResult("kruskal_wallis", 0.0, df, 1.0, n_total)
    h /= correction
    h = max(h, 0.0)
    return TestResult("kruskal_wallis", h, df, chi_square_sf(h, df), n_total)


def f1_scores(confusion: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-class and macro F1 from a square confusion matrix.

    Rows are true classes, columns predicted.  A class that never occurs
    (neither true nor predicted) contributes F1 = 0 and triggers a warning;
    the macro score is the unweighted mean over all classes.

    Returns
    -------
    per_class : ndarray
    macro : float
    """
    confusion = np.asarray(confusion, dtype=float)
    if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
        raise ValueError(f"confusion matrix must be square, got shape {confusion.shape}")
    if np.any(confusion < 0):
        raise ValueError("confusion matrix counts must be nonnegative")
    k = confusion.shape[0]
    per_class = np.zeros(k)
    for c in range(k):
        tp = confusion[c, c]
        true_total = confusion[c, :].sum()
        pred_total = confusion[:, c].sum()
        if true_total == 0 and pred_total == 0:
            warnings.warn(f"class {c} absent from both truth and predictions; F1 set to 0")
            continue
        precision = tp / pred_total if pred_total > 0 else 0.0
        recall = tp / true_total if true_total > 0 else 0.0
        if precision + recall > 0:
            per_class[c] = 2.0 * precision * recall / (precision + recall)
    return per_class, float(np.mean(per_class))


def benjamini_hochberg(p_values, alpha: float = 0.05) -> np.ndarray:
    """Boolean rejection mask under the Benjamini-Hochberg procedure."""
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"p_values must be a vector, got shape {p.shape}")
    m = p.size
    if m == 0:
        return np.zeros(0, dtype=bool)
    order = np.argsort(p)
    thresholds = alpha * (np.arange(1, m + 1) / m)
    below = p[order] <= thresholds
    reject = np.zeros(m, dtype=bool)
    if np.any(below):
        cutoff = np.max(np.nonzero(below)[0])
        reject[order[: cutoff + 1]] = True
    return reject
