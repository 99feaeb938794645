"""Cooperative coevolution for large-scale optimization in noisy environments."""

__version__ = "0.1.0"

from .objective import (
    Bounds,
    BudgetExhausted,
    ConfigurationError,
    NoiseModel,
    ObjectiveFunction,
    clamp_to_bounds,
    evaluate_base,
    register_benchmark,
)
from .grouping import (
    DecomposerConfig,
    arg_decompose,
    delta_grouping,
    dg_decompose,
    grouping_probability,
    multilevel_select,
    random_grouping,
    vil_decompose,
    vil_pair_check,
)
from .optimizer import DeParams, Individual, Population, SubProblemView, optimize
from .ccdriver import CcConfig, ContextVector, cc_optimize, compute_delta, update_context
from .analysis import (
    GroupStats,
    TestResult,
    explicit_average,
    holm_adjust,
    kruskal_wallis,
    mann_whitney_u,
    probability_curve,
    simulate_arg,
)
from .schemas import ExperimentConfig, RunRecord
