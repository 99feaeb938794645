import math

import numpy as np
import pytest

from noisycc.objective import (
    Bounds,
    BudgetExhausted,
    ConfigurationError,
    NoiseModel,
    ObjectiveFunction,
    benchmark_names,
    clamp_to_bounds,
    default_bounds,
    evaluate_base,
    register_benchmark,
)

ALL_BENCHMARKS = ["sphere", "rastrigin", "ackley", "rosenbrock", "dixonprice"]


def dixon_price_optimum(dim):
    # x_i = 2^{-(2^i - 2) / 2^i}, 1-indexed
    i = np.arange(1, dim + 1, dtype=float)
    return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)


class TestBenchmarks:
    def test_registry_contents(self):
        assert benchmark_names() == sorted(ALL_BENCHMARKS)

    @pytest.mark.parametrize("dim", [2, 10, 500])
    def test_sphere_optimum_at_origin(self, dim):
        assert evaluate_base("sphere", np.zeros(dim)) == 0.0

    def test_sphere_simple_value(self):
        assert evaluate_base("sphere", [1.0, 2.0]) == 5.0

    @pytest.mark.parametrize("dim", [2, 10, 500])
    def test_rosenbrock_optimum_at_ones(self, dim):
        assert evaluate_base("rosenbrock", np.ones(dim)) == 0.0

    def test_dixon_price_known_optimum_2d(self):
        x = np.array([1.0, 2.0 ** -0.5])
        assert evaluate_base("dixonprice", x) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("name,opt", [
        ("sphere", np.zeros(500)),
        ("rastrigin", np.zeros(500)),
        ("ackley", np.zeros(500)),
        ("rosenbrock", np.ones(500)),
        ("dixonprice", dixon_price_optimum(500)),
    ])
    def test_all_optima_500d(self, name, opt):
        assert abs(evaluate_base(name, opt)) <= 1e-9

    def test_unknown_benchmark_rejected(self):
        with pytest.raises(ConfigurationError):
            evaluate_base("nope", [1.0])

    @pytest.mark.parametrize("name", ["rosenbrock", "dixonprice"])
    def test_chained_functions_need_two_dims(self, name):
        with pytest.raises(ConfigurationError):
            evaluate_base(name, [1.0])

    def test_nonnegative_over_boxes(self):
        # value 0 only at the optima; no negative values across random samples
        rng = np.random.default_rng(5)
        for name in ALL_BENCHMARKS:
            bounds = default_bounds(name, 10)
            samples = rng.uniform(bounds.lower, bounds.upper, size=(20_000, 10))
            values = np.array([evaluate_base(name, x) for x in samples])
            assert values.min() >= 0.0, name

    def test_registry_extension_hook(self):
        register_benchmark("quartic_t", lambda x: float(np.sum(x**4)), (-1.0, 1.0))
        try:
            assert evaluate_base("quartic_t", [2.0]) == 16.0
            assert default_bounds("quartic_t", 3).upper[0] == 1.0
        finally:
            from noisycc.objective import _REGISTRY
            del _REGISTRY["quartic_t"]


class TestBounds:
    def test_invariants(self):
        with pytest.raises(ConfigurationError):
            Bounds(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        b = Bounds.uniform(3, -2.0, 2.0)
        assert b.dimension == 3

    def test_clamp_projects(self):
        b = Bounds.uniform(2, -100.0, 100.0)
        out = clamp_to_bounds(np.array([150.0, -150.0]), b)
        assert out.tolist() == [100.0, -100.0]

    def test_clamp_idempotent_and_identity_inside(self):
        rng = np.random.default_rng(0)
        b = Bounds.uniform(5, -3.0, 7.0)
        x = rng.uniform(-10, 10, size=5)
        once = clamp_to_bounds(x, b)
        assert np.array_equal(once, clamp_to_bounds(once, b))
        inside = rng.uniform(-3.0, 7.0, size=5)
        assert np.array_equal(clamp_to_bounds(inside, b), inside)

    def test_clamp_zero_fixed_point(self):
        b = Bounds.uniform(2, -1.0, 1.0)
        assert clamp_to_bounds(np.zeros(2), b).tolist() == [0.0, 0.0]

    def test_restrict(self):
        b = Bounds(np.array([0.0, 1.0, 2.0]), np.array([10.0, 11.0, 12.0]))
        sub = b.restrict([2, 0])
        assert sub.lower.tolist() == [2.0, 0.0]
        assert sub.upper.tolist() == [12.0, 10.0]


class TestNoise:
    def test_none_is_identity_bit_for_bit(self):
        f = ObjectiveFunction("sphere", 2, budget=10)
        rng = np.random.default_rng(1)
        assert f.evaluate_noisy([1.0, 2.0], rng) == evaluate_base("sphere", [1.0, 2.0])
        assert f.consumed == 1

    def test_multiplicative_zero_fixed_point(self):
        f = ObjectiveFunction("sphere", 2, budget=100,
                              noise=NoiseModel("multiplicative", 0.1))
        rng = np.random.default_rng(2)
        for _ in range(50):
            assert f.evaluate_noisy([0.0, 0.0], rng) == 0.0

    def test_multiplicative_monte_carlo_stats(self):
        # mean within 1% of the base value, std within [0.095, 0.105] * |v|
        f = ObjectiveFunction("sphere", 2, budget=10_000,
                              noise=NoiseModel("multiplicative", 0.1))
        rng = np.random.default_rng(3)
        x = np.array([1.0, 2.0])
        v = evaluate_base("sphere", x)
        draws = np.array([f.evaluate_noisy(x, rng) for _ in range(10_000)])
        assert abs(draws.mean() - v) < 0.01 * abs(v)
        assert 0.095 * abs(v) <= draws.std(ddof=1) <= 0.105 * abs(v)

    def test_additive_shifts_by_gaussian(self):
        f = ObjectiveFunction("sphere", 2, budget=10_000,
                              noise=NoiseModel("additive", 0.5))
        rng = np.random.default_rng(4)
        x = np.array([1.0, 2.0])
        draws = np.array([f.evaluate_noisy(x, rng) for _ in range(10_000)])
        assert abs(draws.mean() - 5.0) < 0.02
        assert 0.47 <= draws.std(ddof=1) <= 0.53

    def test_invalid_noise_config(self):
        with pytest.raises(ConfigurationError):
            NoiseModel("weird", 0.1)
        with pytest.raises(ConfigurationError):
            NoiseModel("additive", -1.0)

    def test_same_rng_state_reproduces_independent_otherwise(self):
        f1 = ObjectiveFunction("sphere", 2, budget=10,
                               noise=NoiseModel("multiplicative", 0.1))
        f2 = ObjectiveFunction("sphere", 2, budget=10,
                               noise=NoiseModel("multiplicative", 0.1))
        x = [1.0, 1.0]
        a = f1.evaluate_noisy(x, np.random.default_rng(9))
        b = f2.evaluate_noisy(x, np.random.default_rng(9))
        assert a == b
        c = f2.evaluate_noisy(x, np.random.default_rng(10))
        assert c != b


class TestBudget:
    def test_fe_accounting_exact(self):
        f = ObjectiveFunction("sphere", 3, budget=5)
        rng = np.random.default_rng(0)
        for k in range(5):
            f.evaluate_noisy(np.zeros(3), rng)
            assert f.consumed == k + 1
        assert f.remaining == 0
        with pytest.raises(BudgetExhausted):
            f.evaluate_noisy(np.zeros(3), rng)
        assert f.consumed == 5  # never exceeds budget

    def test_oracle_not_counted(self):
        f = ObjectiveFunction("rastrigin", 4, budget=3)
        assert f.true_value(np.zeros(4)) == 0.0
        assert f.consumed == 0

    def test_out_of_bounds_rejected(self):
        f = ObjectiveFunction("sphere", 2, budget=10)
        with pytest.raises(ValueError):
            f.evaluate_noisy([1000.0, 0.0], np.random.default_rng(0))
        with pytest.raises(ValueError):
            f.evaluate_noisy([0.0, 0.0, 0.0], np.random.default_rng(0))
        assert f.consumed == 0
