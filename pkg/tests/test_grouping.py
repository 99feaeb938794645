import math

import numpy as np
import pytest
from scipy.stats import binom, ks_2samp

from noisycc.grouping import (
    DecomposerConfig,
    arg_decompose,
    delta_grouping,
    dg_decompose,
    grouping_probability,
    is_partition,
    multilevel_select,
    random_grouping,
    vil_decompose,
    vil_pair_check,
)
from noisycc.objective import ConfigurationError, NoiseModel, ObjectiveFunction


def oracle_arg_group_count(dim, rng):
    """Independent sequential simulation of the new-group process: variable t
    opens a new group with probability 1/(s+1). Uses per-step integer draws,
    a different RNG consumption pattern than the implementation."""
    s = 0
    for _ in range(dim):
        if int(rng.integers(0, s + 1)) == s:
            s += 1
    return s


class TestArgDecompose:
    def test_single_variable_opens_a_group(self):
        assert arg_decompose(1, np.random.default_rng(0)) == [[0]]

    def test_zero_dimension_rejected(self):
        with pytest.raises(ConfigurationError):
            arg_decompose(0, np.random.default_rng(0))

    @pytest.mark.parametrize("dim", [1, 2, 3, 7, 50, 200])
    def test_partition_fuzz(self, dim):
        rng = np.random.default_rng(dim)
        for _ in range(20):
            assert is_partition(arg_decompose(dim, rng), dim)

    def test_count_distribution_matches_oracle(self):
        # two-sample KS between implementation counts and the independent
        # 1/(s+1) oracle, 10k runs each
        rng_a = np.random.default_rng(11)
        rng_b = np.random.default_rng(12)
        impl = [len(arg_decompose(1000, rng_a)) for _ in range(10_000)]
        orac = [oracle_arg_group_count(1000, rng_b) for _ in range(10_000)]
        stat = ks_2samp(impl, orac).statistic
        assert stat < 0.02

    def test_mean_count_near_sqrt_2d(self):
        # expected count ~ sqrt(2 * D) from the 1/(s+1) birth process
        rng = np.random.default_rng(13)
        counts = [len(arg_decompose(1000, rng)) for _ in range(10_000)]
        mean = float(np.mean(counts))
        assert 42.7 <= mean <= 46.7
        assert abs(mean - math.sqrt(2000.0)) / math.sqrt(2000.0) < 0.05


class TestRandomGrouping:
    def test_structure(self):
        groups = random_grouping(4, 2, np.random.default_rng(0))
        assert len(groups) == 2 and all(len(g) == 2 for g in groups)
        assert is_partition(groups, 4)

    def test_1000_into_10_groups_of_100(self):
        groups = random_grouping(1000, 10, np.random.default_rng(1))
        assert len(groups) == 10 and all(len(g) == 100 for g in groups)
        assert is_partition(groups, 1000)

    def test_singletons_when_m_equals_d(self):
        for seed in range(5):
            groups = random_grouping(4, 4, np.random.default_rng(seed))
            assert sorted(groups) == [[0], [1], [2], [3]]

    def test_divisibility_enforced(self):
        with pytest.raises(ConfigurationError):
            random_grouping(10, 3, np.random.default_rng(0))

    @pytest.mark.parametrize("dim,m", [(4, 2), (200, 8), (30, 5)])
    def test_partition_fuzz(self, dim, m):
        rng = np.random.default_rng(dim + m)
        for _ in range(10):
            assert is_partition(random_grouping(dim, m, rng), dim)


class TestDeltaGrouping:
    def test_sorted_by_descending_magnitude(self):
        groups = delta_grouping(np.array([0.5, 0.1, 0.9, 0.3]), 2)
        assert groups == [[2, 0], [3, 1]]

    def test_ties_break_by_ascending_index(self):
        groups = delta_grouping(np.ones(4), 2)
        assert groups == [[0, 1], [2, 3]]

    def test_partition_property(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            delta = rng.random(12)
            assert is_partition(delta_grouping(delta, 4), 12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(4)
        delta = rng.random(20)
        assert delta_grouping(delta, 5) == delta_grouping(3.7 * delta, 5)


class TestMultilevelSelect:
    def test_singleton(self):
        assert multilevel_select([5], [0.0], np.random.default_rng(0)) == 5

    def test_uniform_at_cold_start(self):
        rng = np.random.default_rng(1)
        candidates = [5, 10, 25, 50]
        draws = [multilevel_select(candidates, [0, 0, 0, 0], rng) for _ in range(40_000)]
        for c in candidates:
            assert abs(draws.count(c) / 40_000 - 0.25) < 0.02

    def test_weighted_by_score_plus_one(self):
        rng = np.random.default_rng(2)
        draws = [multilevel_select([5, 10], [1.0, 0.0], rng) for _ in range(40_000)]
        assert abs(draws.count(5) / 40_000 - 2.0 / 3.0) < 0.02

    def test_empty_candidates_rejected(self):
        with pytest.raises(ConfigurationError):
            multilevel_select([], [], np.random.default_rng(0))


def brute_force_interacting_pairs(name, dim, epsilon):
    """All ordered-pairs nonlinearity check computed with the noiseless
    oracle (probe to midpoint, context shift to upper bound), independent
    of dg_decompose's bookkeeping. Returns undirected pairs."""
    from noisycc.objective import default_bounds, evaluate_base

    bounds = default_bounds(name, dim)
    lb, ub = bounds.lower, bounds.upper
    mid = (lb + ub) / 2.0
    pairs = set()
    for i in range(dim):
        for j in range(dim):
            if i == j:
                continue
            s = lb.copy()
            s_i = lb.copy(); s_i[i] = mid[i]
            s_j = lb.copy(); s_j[j] = ub[j]
            s_ij = s_i.copy(); s_ij[j] = ub[j]
            d1 = evaluate_base(name, s_i) - evaluate_base(name, s)
            d2 = evaluate_base(name, s_ij) - evaluate_base(name, s_j)
            if abs(d2 - d1) >= epsilon:
                pairs.add(tuple(sorted((i, j))))
    return pairs


class TestDifferentialGrouping:
    def test_noiseless_sphere_fully_separable(self):
        f = ObjectiveFunction("sphere", 4, budget=10_000)
        res = dg_decompose(f, 1e-3, np.random.default_rng(0))
        assert res.groups == [[0], [1], [2], [3]]
        assert not res.truncated
        assert res.evaluations == f.consumed

    def test_noiseless_rosenbrock_consecutive_links(self):
        # the brute-force oracle shows only consecutive-variable interactions;
        # a single pass over the examined variable's direct links gives
        # {0,1} and {2,3}
        assert brute_force_interacting_pairs("rosenbrock", 4, 1e-3) == {(0, 1), (1, 2), (2, 3)}
        f = ObjectiveFunction("rosenbrock", 4, budget=10_000)
        res = dg_decompose(f, 1e-3, np.random.default_rng(0))
        assert res.groups == [[0, 1], [2, 3]]

    def test_fe_accounting_matches_report(self):
        f = ObjectiveFunction("rastrigin", 6, budget=10_000)
        before = f.consumed
        res = dg_decompose(f, 1e-3, np.random.default_rng(0))
        assert f.consumed - before == res.evaluations

    def test_multiplicative_noise_breaks_the_check(self):
        # under multiplicative noise virtually every examined pair is
        # flagged interacting
        examined = 0
        flagged = 0
        for seed in range(25):
            f = ObjectiveFunction("sphere", 20, budget=10_000,
                                  noise=NoiseModel("multiplicative", 0.1))
            res = dg_decompose(f, 1e-3, np.random.default_rng(seed))
            for g in res.groups:
                lead = g[0]
                examined += sum(1 for j in g if j != lead)
            # pairs examined but not flagged are those that stayed outside
            sizes = [len(g) for g in res.groups]
            flagged += sum(s - 1 for s in sizes if s > 1)
        assert flagged / max(1, examined) >= 0.95

    def test_budget_exhaustion_returns_partial_plus_singletons(self):
        f = ObjectiveFunction("rosenbrock", 6, budget=7)
        res = dg_decompose(f, 1e-3, np.random.default_rng(0))
        assert res.truncated
        assert is_partition(res.groups, 6)
        assert res.evaluations == 7
        assert f.remaining == 0


class TestVilPairCheck:
    def test_additively_separable_pair(self):
        f = ObjectiveFunction("sphere", 2, budget=10_000)
        res = vil_pair_check(f, 0, 1, 50, np.random.default_rng(0))
        assert res.separable
        assert res.evaluations == 200

    def test_interaction_without_nonseparability(self):
        # (x_i + x_j)^2 on [0, 10]^2 is monotone in each coordinate, so the
        # check keeps it separable despite the cross term
        from noisycc.objective import Bounds, register_benchmark, _REGISTRY

        register_benchmark("sumsq_t", lambda x: float((x[0] + x[1]) ** 2), (0.0, 10.0))
        try:
            for seed in range(10):
                f = ObjectiveFunction("sumsq_t", 2, budget=10_000)
                res = vil_pair_check(f, 0, 1, 50, np.random.default_rng(seed))
                assert res.separable
        finally:
            del _REGISTRY["sumsq_t"]

    def test_rosenbrock_pair_detected(self):
        detected = 0
        for seed in range(25):
            f = ObjectiveFunction("rosenbrock", 2, budget=10_000)
            res = vil_pair_check(f, 0, 1, 50, np.random.default_rng(seed))
            detected += not res.separable
        assert detected >= 23  # probability > 0.9 over seeds

    def test_budget_exhaustion_defaults_to_separable(self):
        f = ObjectiveFunction("rosenbrock", 2, budget=2)
        res = vil_pair_check(f, 0, 1, 50, np.random.default_rng(0))
        assert res.separable and res.truncated
        assert res.evaluations == 2

    def test_counts_match_budget_interplay(self):
        f = ObjectiveFunction("sphere", 3, budget=1000)
        before = f.consumed
        res = vil_pair_check(f, 0, 2, 10, np.random.default_rng(1))
        assert f.consumed - before == res.evaluations


class TestVilDecompose:
    def test_sphere_all_singletons(self):
        f = ObjectiveFunction("sphere", 5, budget=100_000)
        res = vil_decompose(f, 10, np.random.default_rng(0))
        assert res.groups == [[0], [1], [2], [3], [4]]

    def test_rosenbrock_chain_merges(self):
        f = ObjectiveFunction("rosenbrock", 4, budget=100_000)
        res = vil_decompose(f, 20, np.random.default_rng(1))
        assert is_partition(res.groups, 4)
        # consecutive pairs interact, so the union-find chains everything
        assert len(res.groups) < 4

    def test_truncation_flagged(self):
        f = ObjectiveFunction("rosenbrock", 6, budget=10)
        res = vil_decompose(f, 10, np.random.default_rng(2))
        assert res.truncated
        assert is_partition(res.groups, 6)


class TestGroupingProbability:
    @pytest.mark.parametrize("n,k,m,expected,tol", [
        (60, 1, 10, 0.9982, 1e-4),
        (60, 2, 10, 0.9862, 1e-4),
        (60, 1, 45, 0.7403, 1e-3),
        (60, 2, 45, 0.3862, 1e-3),
    ])
    def test_reported_values(self, n, k, m, expected, tol):
        assert grouping_probability(n, k, m) == pytest.approx(expected, abs=tol)

    def test_k_zero_is_one(self):
        for n, m in [(1, 1), (10, 3), (60, 45)]:
            assert grouping_probability(n, 0, m) == 1.0

    def test_against_scipy_binomial_tail(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 200))
            m = int(rng.integers(2, 60))
            k = int(rng.integers(0, n + 1))
            expected = float(binom.sf(k - 1, n, 1.0 / m))
            assert grouping_probability(n, k, m) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_monotonicity_and_range(self):
        for m in (2, 10, 45):
            values = [grouping_probability(60, k, m) for k in range(0, 61)]
            assert all(0.0 <= v <= 1.0 for v in values)
            assert all(a >= b for a, b in zip(values, values[1:]))
        # nondecreasing in N for fixed k >= 1
        for k in (1, 2, 5):
            values = [grouping_probability(n, k, 10) for n in range(k, 120)]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            grouping_probability(10, 11, 5)
        with pytest.raises(ConfigurationError):
            grouping_probability(10, 1, 0)


class TestDecomposerConfig:
    def test_strategy_validation(self):
        with pytest.raises(ConfigurationError):
            DecomposerConfig("bogus")
        with pytest.raises(ConfigurationError):
            DecomposerConfig("random")  # needs group_count
        cfg = DecomposerConfig("random", group_count=5)
        assert cfg.group_count == 5
