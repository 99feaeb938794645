"""Search-space geometry, classic benchmarks, noise models, and budgeted evaluation.

Every observed (noisy) evaluation is charged against a fixed budget of
fitness evaluations (FEs); the noiseless oracle used by tests is free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ConfigurationError(ValueError):
    """Invalid benchmark name, dimension, or parameter combination."""


class BudgetExhausted(Exception):
    """The evaluation budget is spent; drivers should stop cleanly."""


# ----------------------------------------------------------------------
# Bounds
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    """Box constraints, one (lower, upper) pair per dimension."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.ndim != 1 or hi.ndim != 1 or lo.size != hi.size or lo.size == 0:
            raise ConfigurationError("bounds arrays must be 1-d and of equal nonzero length")
        if not np.all(lo < hi):
            raise ConfigurationError("every lower bound must be strictly below its upper bound")

    @property
    def dimension(self) -> int:
        return self.lower.size

    @classmethod
    def uniform(cls, dimension: int, low: float, high: float) -> "Bounds":
        if dimension < 1:
            raise ConfigurationError("dimension must be positive")
        return cls(np.full(dimension, float(low)), np.full(dimension, float(high)))

    def restrict(self, indices) -> "Bounds":
        """Bounds of the sub-problem spanned by the given dimension indices."""
        idx = np.asarray(indices, dtype=int)
        return Bounds(self.lower[idx], self.upper[idx])

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return x.size == self.dimension and bool(
            np.all(x >= self.lower) and np.all(x <= self.upper)
        )

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)


def clamp_to_bounds(x: np.ndarray, bounds: Bounds) -> np.ndarray:
    """Project each coordinate onto its box interval. Idempotent."""
    x = np.asarray(x, dtype=float)
    if x.size != bounds.dimension:
        raise ValueError(f"vector length {x.size} does not match bounds dimension {bounds.dimension}")
    return np.clip(x, bounds.lower, bounds.upper)


# ----------------------------------------------------------------------
# Benchmark registry
# ----------------------------------------------------------------------

def sphere(x: np.ndarray) -> float:
    return float((x * x).sum())


def rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + (x * x - 10.0 * np.cos((2.0 * np.pi) * x)).sum())


def ackley(x: np.ndarray) -> float:
    d = x.size
    s1 = (x * x).sum() / d
    s2 = np.cos((2.0 * np.pi) * x).sum() / d
    return float(-20.0 * np.exp(-0.2 * np.sqrt(s1)) - np.exp(s2) + 20.0 + np.e)


def rosenbrock(x: np.ndarray) -> float:
    return float((100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2).sum())


def dixon_price(x: np.ndarray) -> float:
    i = np.arange(2, x.size + 1, dtype=float)
    return float((x[0] - 1.0) ** 2 + (i * (2.0 * x[1:] ** 2 - x[:-1]) ** 2).sum())


@dataclass(frozen=True)
class BenchmarkInfo:
    name: str
    evaluator: Callable[[np.ndarray], float]
    default_box: tuple[float, float]
    min_dimension: int = 1


_REGISTRY: dict[str, BenchmarkInfo] = {}


def register_benchmark(name: str, evaluator, default_box: tuple[float, float],
                       min_dimension: int = 1) -> None:
    """Extension hook: add an (id, evaluator, default box) triple to the registry."""
    key = name.lower()
    _REGISTRY[key] = BenchmarkInfo(key, evaluator, (float(default_box[0]), float(default_box[1])),
                                   min_dimension)


register_benchmark("sphere", sphere, (-100.0, 100.0))
register_benchmark("rastrigin", rastrigin, (-5.12, 5.12))
register_benchmark("ackley", ackley, (-32.768, 32.768))
register_benchmark("rosenbrock", rosenbrock, (-30.0, 30.0), min_dimension=2)
register_benchmark("dixonprice", dixon_price, (-10.0, 10.0), min_dimension=2)


def benchmark_names() -> list[str]:
    return sorted(_REGISTRY)


def benchmark_info(name: str) -> BenchmarkInfo:
    try:
        return _REGISTRY[name.lower()]
    except KeyError:
        raise ConfigurationError(f"unknown benchmark id {name!r}; known: {benchmark_names()}") from None


def evaluate_base(name: str, x) -> float:
    """Exact closed-form benchmark value. Deterministic, no FE accounting."""
    info = benchmark_info(name)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ConfigurationError("input must be a nonempty 1-d vector")
    if x.size < info.min_dimension:
        raise ConfigurationError(f"{info.name} requires dimension >= {info.min_dimension}")
    return info.evaluator(x)


def default_bounds(name: str, dimension: int) -> Bounds:
    lo, hi = benchmark_info(name).default_box
    return Bounds.uniform(dimension, lo, hi)


# ----------------------------------------------------------------------
# Noise
# ----------------------------------------------------------------------

NOISE_KINDS = ("none", "additive", "multiplicative")


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian corruption of observed fitness values.

    multiplicative: f * (1 + beta), additive: f + eta, with beta and eta
    drawn from N(0, sigma^2). kind "none" is the identity.
    """

    kind: str = "none"
    sigma: float = 0.1

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigurationError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be nonnegative")

    def apply(self, value: float, rng: np.random.Generator) -> float:
        if self.kind == "none":
            return value
        draw = rng.normal(0.0, self.sigma)
        if self.kind == "additive":
            return value + draw
        return value * (1.0 + draw)


# ----------------------------------------------------------------------
# Budget-counted objective
# ----------------------------------------------------------------------

class ObjectiveFunction:
    """A benchmark composed with a noise model and an FE budget.

    ``consumed`` counts observed evaluations only and never exceeds
    ``budget``; querying the noiseless value does not count.
    """

    def __init__(self, benchmark: str, dimension: int, budget: int,
                 noise: NoiseModel | None = None, bounds: Bounds | None = None):
        info = benchmark_info(benchmark)
        if dimension < max(1, info.min_dimension):
            raise ConfigurationError(f"{info.name} requires dimension >= {info.min_dimension}")
        if budget < 0:
            raise ConfigurationError("budget must be nonnegative")
        self.benchmark = info.name
        self.bounds = bounds if bounds is not None else default_bounds(info.name, dimension)
        if self.bounds.dimension != dimension:
            raise ConfigurationError("bounds dimension does not match the requested dimension")
        self.noise = noise if noise is not None else NoiseModel("none")
        self.budget = int(budget)
        self.consumed = 0
        self._evaluator = info.evaluator

    @property
    def remaining(self) -> int:
        return self.budget - self.consumed

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.size != self.bounds.dimension:
            raise ValueError(
                f"point has {x.size} coordinates, objective expects {self.bounds.dimension}"
            )
        if not ((x >= self.bounds.lower).all() and (x <= self.bounds.upper).all()):
            raise ValueError("point lies outside the search box")
        return x

    def evaluate_noisy(self, x, rng: np.random.Generator) -> float:
        """Observed fitness; consumes exactly one FE or raises BudgetExhausted."""
        if self.consumed >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} FEs exhausted")
        x = self._check_point(x)
        value = self.noise.apply(self._evaluator(x), rng)
        self.consumed += 1
        return value

    def true_value(self, x) -> float:
        """Noiseless oracle for tests and trace auditing. Not charged to the budget."""
        return evaluate_base(self.benchmark, self._check_point(x))
