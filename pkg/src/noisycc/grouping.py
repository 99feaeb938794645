"""Decomposition strategies: six ways to partition {0..D-1} into sub-problems.

A grouping is a plain list of integer lists forming a partition of the
dimension indices. Strategies that probe the objective (differential
grouping, interaction learning) charge their evaluations to the shared
FE budget and report exactly what they consumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .objective import BudgetExhausted, ConfigurationError, ObjectiveFunction

Grouping = list[list[int]]

STRATEGIES = ("arg", "random", "delta", "multilevel", "dg", "vil")


@dataclass
class DecomposerConfig:
    strategy: str = "arg"
    group_count: int | None = None          # random / delta
    candidate_counts: tuple[int, ...] = (5, 10, 25, 50)  # multilevel
    epsilon: float = 1e-3                   # dg nonlinearity threshold
    vil_samples: int = 10                   # monotonicity samples per pair

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigurationError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.strategy in ("random", "delta") and (self.group_count is None or self.group_count < 1):
            raise ConfigurationError(f"strategy {self.strategy!r} needs a positive group_count")
        if self.strategy == "multilevel" and not self.candidate_counts:
            raise ConfigurationError("multilevel needs a nonempty candidate list")
        if self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")
        if self.vil_samples < 1:
            raise ConfigurationError("vil_samples must be positive")


def is_partition(groups: Grouping, dimension: int) -> bool:
    """True when groups are disjoint, nonempty, and cover {0..dimension-1}."""
    seen: set[int] = set()
    for g in groups:
        if not g:
            return False
        for j in g:
            if j in seen:
                return False
            seen.add(j)
    return seen == set(range(dimension))


# ----------------------------------------------------------------------
# Hyperparameter-free and m x k strategies
# ----------------------------------------------------------------------

def arg_decompose(dimension: int, rng: np.random.Generator) -> Grouping:
    """Automatic random grouping: shuffle the variables, then each one joins
    one of the s existing groups or opens a new group, uniformly over the
    s + 1 choices. No user hyperparameters."""
    if dimension < 1:
        raise ConfigurationError("dimension must be positive")
    order = rng.permutation(dimension).tolist()
    draws = rng.random(dimension).tolist()
    groups: list[list[int]] = []
    for idx, u in zip(order, draws):
        s = len(groups)
        r = int(u * (s + 1))  # uniform over {0..s}; r == s opens a new group
        if r == s:
            groups.append([idx])
        else:
            groups[r].append(idx)
    return [sorted(g) for g in groups]


def random_grouping(dimension: int, group_count: int, rng: np.random.Generator) -> Grouping:
    """Uniformly random permutation chunked into group_count equal groups."""
    if group_count < 1 or dimension % group_count != 0:
        raise ConfigurationError(
            f"group_count {group_count} must be positive and divide dimension {dimension}"
        )
    size = dimension // group_count
    perm = rng.permutation(dimension)
    return [sorted(perm[i * size:(i + 1) * size].tolist()) for i in range(group_count)]


def delta_grouping(delta: np.ndarray, group_count: int) -> Grouping:
    """Indices sorted by descending coordinate movement, chunked into equal
    groups. Ties break by ascending index, so the output depends only on
    the ordering of the deltas."""
    delta = np.asarray(delta, dtype=float)
    dimension = delta.size
    if group_count < 1 or dimension % group_count != 0:
        raise ConfigurationError(
            f"group_count {group_count} must be positive and divide dimension {dimension}"
        )
    order = sorted(range(dimension), key=lambda j: (-delta[j], j))
    size = dimension // group_count
    return [order[i * size:(i + 1) * size] for i in range(group_count)]


def multilevel_select(candidates, scores, rng: np.random.Generator) -> int:
    """Pick a group count with probability proportional to (score + 1).

    Uniform at cold start (all scores zero), exploitative once some
    candidates have accumulated improvement.
    """
    candidates = list(candidates)
    if not candidates:
        raise ConfigurationError("candidate list must be nonempty")
    scores = np.asarray(list(scores), dtype=float)
    if scores.size != len(candidates) or np.any(scores < 0):
        raise ConfigurationError("scores must be nonnegative and match the candidates")
    weights = scores + 1.0
    probs = weights / weights.sum()
    return int(candidates[rng.choice(len(candidates), p=probs)])


# ----------------------------------------------------------------------
# Fitness-probing strategies
# ----------------------------------------------------------------------

@dataclass
class DecompositionResult:
    groups: Grouping
    evaluations: int
    truncated: bool = False


def dg_decompose(f: ObjectiveFunction, epsilon: float, rng: np.random.Generator) -> DecompositionResult:
    """Differential grouping via the nonlinearity check.

    For the first unassigned variable i, moving i from the lower-bound
    corner to the domain midpoint yields delta1; repeating after shifting
    j to its upper bound yields delta2. |delta2 - delta1| >= epsilon puts
    j into i's group; the group closes after all remaining j are examined,
    so one pass captures the direct links of the examined variable.
    Probing i to the midpoint (rather than the opposite corner) keeps
    couplings through x_i^2 visible on symmetric boxes. Budget exhaustion
    returns the groups built so far plus singletons for the rest.
    """
    if epsilon <= 0:
        raise ConfigurationError("epsilon must be positive")
    dim = f.bounds.dimension
    lb, ub = f.bounds.lower, f.bounds.upper
    mid = (lb + ub) / 2.0
    remaining = list(range(dim))
    groups: Grouping = []
    group: list[int] = []
    start = f.consumed
    truncated = False
    try:
        while remaining:
            i = remaining.pop(0)
            group = [i]
            base = lb.copy()
            base_i = lb.copy()
            base_i[i] = mid[i]
            f_base = f.evaluate_noisy(base, rng)
            f_base_i = f.evaluate_noisy(base_i, rng)
            delta1 = f_base_i - f_base
            separable = []
            for j in remaining:
                p_j = base.copy()
                p_j[j] = ub[j]
                p_ij = base_i.copy()
                p_ij[j] = ub[j]
                f_j = f.evaluate_noisy(p_j, rng)
                f_ij = f.evaluate_noisy(p_ij, rng)
                delta2 = f_ij - f_j
                if abs(delta2 - delta1) >= epsilon:
                    group.append(j)
                else:
                    separable.append(j)
            remaining = separable
            groups.append(sorted(group))
            group = []
    except BudgetExhausted:
        truncated = True
        assigned = {j for g in groups for j in g}
        if group:
            # in-progress group keeps the members found before the cut-off
            groups.append(sorted(group))
            assigned.update(group)
        groups.extend([j] for j in range(dim) if j not in assigned)
    return DecompositionResult(groups, f.consumed - start, truncated)


@dataclass
class VilCheckResult:
    separable: bool
    evaluations: int
    truncated: bool = False


def vil_pair_check(f: ObjectiveFunction, i: int, j: int, samples: int,
                   rng: np.random.Generator) -> VilCheckResult:
    """Monotonicity check on one variable pair.

    Each sample draws a random context s plus fresh values for coordinates
    i and j, evaluates the quadruple (s, s_i, s_j, s_ij), and flags the
    pair nonseparable as soon as moving one coordinate improves the
    observed fitness in one context of the other but worsens it in the
    second; the quadruple is checked under all of its labelings. The pair
    stays separable when every sampled move acts with a consistent
    direction. Budget exhaustion defaults the pair to separable.
    """
    if i == j:
        raise ConfigurationError("pair check needs two distinct indices")
    lb, ub = f.bounds.lower, f.bounds.upper
    start = f.consumed
    try:
        for _ in range(samples):
            s = f.bounds.sample(rng)
            xi = rng.uniform(lb[i], ub[i])
            xj = rng.uniform(lb[j], ub[j])
            s_i = s.copy()
            s_i[i] = xi
            s_j = s.copy()
            s_j[j] = xj
            s_ij = s_i.copy()
            s_ij[j] = xj
            f_s = f.evaluate_noisy(s, rng)
            f_si = f.evaluate_noisy(s_i, rng)
            f_sj = f.evaluate_noisy(s_j, rng)
            f_sij = f.evaluate_noisy(s_ij, rng)
            i_flips = (f_s > f_si and f_sj < f_sij) or (f_s < f_si and f_sj > f_sij)
            j_flips = (f_s > f_sj and f_si < f_sij) or (f_s < f_sj and f_si > f_sij)
            if i_flips or j_flips:
                return VilCheckResult(False, f.consumed - start)
    except BudgetExhausted:
        return VilCheckResult(True, f.consumed - start, truncated=True)
    return VilCheckResult(True, f.consumed - start)


def vil_decompose(f: ObjectiveFunction, samples: int, rng: np.random.Generator) -> DecompositionResult:
    """Pairwise monotonicity checks merged with union-find.

    Pairs already connected through earlier merges are skipped; once the
    budget runs out every unexamined pair defaults to separable.
    """
    dim = f.bounds.dimension
    parent = list(range(dim))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    start = f.consumed
    truncated = False
    for i in range(dim):
        for j in range(i + 1, dim):
            if truncated or find(i) == find(j):
                continue
            res = vil_pair_check(f, i, j, samples, rng)
            if res.truncated:
                truncated = True
            elif not res.separable:
                parent[find(j)] = find(i)
    components: dict[int, list[int]] = {}
    for v in range(dim):
        components.setdefault(find(v), []).append(v)
    groups = sorted((sorted(g) for g in components.values()), key=lambda g: g[0])
    return DecompositionResult(groups, f.consumed - start, truncated)


# ----------------------------------------------------------------------
# Co-occurrence probability
# ----------------------------------------------------------------------

def grouping_probability(cycles: int, min_cooccurrences: int, group_count: int) -> float:
    """Probability that two interacting variables land in the same group in
    at least ``min_cooccurrences`` of ``cycles`` independent regroupings
    with ``group_count`` equally likely groups.

    Binomial upper tail with p = 1/m, summed in the log domain.
    """
    n, k, m = cycles, min_cooccurrences, group_count
    if m < 1:
        raise ConfigurationError("group count must be at least 1")
    if k < 0 or k > n:
        raise ValueError(f"min_cooccurrences must lie in [0, {n}], got {k}")
    if k == 0 or m == 1:
        return 1.0
    log_p = -math.log(m)
    log_q = math.log1p(-1.0 / m)
    terms = [
        math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)
        + r * log_p + (n - r) * log_q
        for r in range(k, n + 1)
    ]
    total = math.fsum(math.exp(t) for t in terms)
    return min(1.0, max(0.0, total))
