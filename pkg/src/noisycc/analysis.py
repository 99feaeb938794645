"""Statistical machinery: grouping simulations, co-occurrence curves,
explicit-averaging estimators, and the nonparametric tests used to compare
seeded runs (Kruskal-Wallis, Mann-Whitney U, Holm adjustment)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import chi2

from .grouping import arg_decompose, grouping_probability
from .objective import ConfigurationError


# ----------------------------------------------------------------------
# Grouping statistics
# ----------------------------------------------------------------------

@dataclass
class GroupStats:
    dimension: int
    runs: int
    count_histogram: dict[int, int]   # group count -> frequency over runs
    size_mean: float                  # per-run mean group size, averaged over runs
    size_min: int
    size_max: int

    @property
    def modal_count(self) -> int:
        return max(self.count_histogram, key=lambda c: (self.count_histogram[c], -c))

    @property
    def mean_count(self) -> float:
        return sum(c * f for c, f in self.count_histogram.items()) / self.runs


def simulate_arg(dimension: int, runs: int, rng: np.random.Generator) -> GroupStats:
    """Repeatedly run the automatic random decomposer and aggregate the
    group-count histogram and group-size statistics."""
    if runs < 1:
        raise ConfigurationError("runs must be positive")
    histogram: dict[int, int] = {}
    size_min = dimension
    size_max = 1
    mean_size_sum = 0.0
    for _ in range(runs):
        groups = arg_decompose(dimension, rng)
        count = len(groups)
        histogram[count] = histogram.get(count, 0) + 1
        sizes = [len(g) for g in groups]
        size_min = min(size_min, min(sizes))
        size_max = max(size_max, max(sizes))
        mean_size_sum += dimension / count
    return GroupStats(dimension, runs, dict(sorted(histogram.items())),
                      mean_size_sum / runs, size_min, size_max)


def probability_curve(cycles: int, group_count: int, k_max: int) -> list[tuple[int, float]]:
    """Co-occurrence probability for k = 0..k_max, ready for CSV plotting."""
    if k_max > cycles:
        raise ValueError(f"k_max must not exceed cycles ({cycles}), got {k_max}")
    return [(k, grouping_probability(cycles, k, group_count)) for k in range(k_max + 1)]


# ----------------------------------------------------------------------
# Explicit averaging
# ----------------------------------------------------------------------

def explicit_average(samples) -> tuple[float, float, float]:
    """Mean, sample standard deviation ((m-1) divisor, squared deviations)
    and standard error of the mean of repeated fitness observations."""
    values = np.asarray(list(samples), dtype=float)
    m = values.size
    if m < 2:
        raise ValueError("need at least 2 samples for std and standard error")
    mean = float(values.mean())
    std = math.sqrt(float(np.sum((values - mean) ** 2)) / (m - 1))
    return mean, std, std / math.sqrt(m)


# ----------------------------------------------------------------------
# Rank tests
# ----------------------------------------------------------------------

@dataclass
class TestResult:
    statistic: float
    p_value: float
    method: str


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(values: np.ndarray) -> float:
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


EXACT_LIMIT = 8  # exact enumeration when min(n, m) <= this


def mann_whitney_u(a, b, alternative: str = "two-sided") -> TestResult:
    """Mann-Whitney U with midrank ties.

    The statistic is U for the first sample. Small samples
    (min(n, m) <= 8) get an exact conditional p by enumerating all
    C(n+m, n) assignments of the pooled midranks; larger samples use the
    normal approximation with tie-corrected variance.
    """
    a = np.asarray(list(a), dtype=float)
    b = np.asarray(list(b), dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    if alternative not in ("two-sided", "less", "greater"):
        raise ValueError(f"unknown alternative {alternative!r}")
    n, m = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    u = float(ranks[:n].sum() - n * (n + 1) / 2.0)

    if np.all(pooled == pooled[0]):
        return TestResult(u, 1.0, "mann_whitney_u")

    if min(n, m) <= EXACT_LIMIT:
        offset = n * (n + 1) / 2.0
        count_le = 0
        count_ge = 0
        total = 0
        for combo in combinations(range(n + m), n):
            u_perm = ranks[list(combo)].sum() - offset
            total += 1
            if u_perm <= u:
                count_le += 1
            if u_perm >= u:
                count_ge += 1
        p_less = count_le / total
        p_greater = count_ge / total
    else:
        total_n = n + m
        mu = n * m / 2.0
        sigma2 = n * m / 12.0 * ((total_n + 1) - _tie_term(pooled) / (total_n * (total_n - 1)))
        if sigma2 <= 0:
            return TestResult(u, 1.0, "mann_whitney_u")
        z = (u - mu) / math.sqrt(sigma2)
        p_less = 0.5 * math.erfc(-z / math.sqrt(2.0))
        p_greater = 0.5 * math.erfc(z / math.sqrt(2.0))

    if alternative == "less":
        p = p_less
    elif alternative == "greater":
        p = p_greater
    else:
        p = 2.0 * min(p_less, p_greater)
    return TestResult(u, min(1.0, p), "mann_whitney_u")


def kruskal_wallis(groups) -> TestResult:
    """Kruskal-Wallis H with tie correction; p from chi-squared with
    (number of groups - 1) degrees of freedom."""
    samples = [np.asarray(list(g), dtype=float) for g in groups]
    if len(samples) < 2 or any(s.size == 0 for s in samples):
        raise ValueError("need at least two nonempty groups")
    pooled = np.concatenate(samples)
    total_n = pooled.size
    ranks = _midranks(pooled)
    h = 0.0
    offset = 0
    for s in samples:
        r_sum = float(ranks[offset:offset + s.size].sum())
        h += r_sum ** 2 / s.size
        offset += s.size
    h = 12.0 / (total_n * (total_n + 1)) * h - 3.0 * (total_n + 1)
    correction = 1.0 - _tie_term(pooled) / (total_n ** 3 - total_n)
    if correction <= 0:  # every observation identical
        return TestResult(0.0, 1.0, "kruskal_wallis")
    h = max(0.0, h / correction)
    p = float(chi2.sf(h, len(samples) - 1))
    return TestResult(h, p, "kruskal_wallis")


def holm_adjust(p_values) -> list[float]:
    """Step-down Holm adjustment with enforced monotonicity, capped at 1."""
    ps = list(map(float, p_values))
    if any(p < 0 or p > 1 for p in ps):
        raise ValueError("p-values must lie in [0, 1]")
    n = len(ps)
    order = sorted(range(n), key=lambda i: ps[i])
    adjusted = [0.0] * n
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, min(1.0, (n - rank) * ps[idx]))
        adjusted[idx] = running
    return adjusted
