"""Cooperative-coevolution driver.

Repeatedly decomposes the problem, optimizes the sub-problems round-robin
against a shared context vector, and commits a group's best candidate to
the context only when its observed composed fitness improves on the
context's stored observation. Runs until the FE budget is exhausted.

Randomness is split over three child streams (context init, decomposition,
optimization) so that a degenerate single-group run consumes the
optimization stream exactly like a standalone optimizer run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grouping as gr
from .objective import BudgetExhausted, ConfigurationError, ObjectiveFunction
from .optimizer import (
    BestTracker,
    DeParams,
    Population,
    SubProblemView,
    init_population,
    run_generation,
)


@dataclass
class ContextVector:
    """Current best full-dimensional cooperative solution."""

    values: np.ndarray
    observed_fitness: float = math.inf


def update_context(cv: ContextVector, group: list[int], genome: np.ndarray,
                   observed: float) -> ContextVector:
    """Replace the group's coordinates with the candidate genome when the
    observed composed fitness strictly improves on the context's stored
    observation; otherwise return the context unchanged."""
    genome = np.asarray(genome, dtype=float)
    if genome.size != len(group):
        raise ValueError(f"genome length {genome.size} does not match group size {len(group)}")
    if observed < cv.observed_fitness:
        values = cv.values.copy()
        values[np.asarray(group, dtype=int)] = genome
        return ContextVector(values, float(observed))
    return cv


def compute_delta(previous_context: np.ndarray, current_context: np.ndarray) -> np.ndarray:
    """Coordinate-wise absolute movement of the context between cycles."""
    previous_context = np.asarray(previous_context, dtype=float)
    current_context = np.asarray(current_context, dtype=float)
    if previous_context.size != current_context.size:
        raise ValueError("context vectors must have equal length")
    return np.abs(current_context - previous_context)


@dataclass
class CcConfig:
    decomposer: gr.DecomposerConfig = field(default_factory=gr.DecomposerConfig)
    optimizer: DeParams = field(default_factory=DeParams)
    population_size: int = 50
    generations_per_cycle: int = 1
    track_true: bool = False
    log_groupings: bool = False

    def __post_init__(self):
        if self.population_size < 4:
            raise ConfigurationError("population size must be at least 4")
        if self.generations_per_cycle < 1:
            raise ConfigurationError("generations_per_cycle must be positive")


@dataclass
class CcRunResult:
    # trace rows: (FEs consumed, best observed so far, best true or None)
    trace: list[tuple[int, float, float | None]]
    final_context: np.ndarray
    final_context_observed: float
    best_observed: float
    best_genome: np.ndarray | None
    cycles: int
    grouping_counts: list[int]
    decomposition_evaluations: int = 0
    decomposition_truncated: bool = False
    groupings: list[gr.Grouping] | None = None


class _GroupingSchedule:
    """Produces the grouping for each cycle according to the strategy.

    arg / random / multilevel regroup every cycle, delta regroups from the
    latest context movement, dg / vil decompose once up front and reuse.
    """

    def __init__(self, cfg: gr.DecomposerConfig, objective: ObjectiveFunction,
                 rng: np.random.Generator):
        self.cfg = cfg
        self.objective = objective
        self.rng = rng
        self.dim = objective.bounds.dimension
        self.delta = np.zeros(self.dim)
        self.ml_scores = [0.0] * len(cfg.candidate_counts)
        self.last_ml_choice: int | None = None
        self.fixed: gr.Grouping | None = None
        self.decomposition_evaluations = 0
        self.decomposition_truncated = False
        if cfg.strategy in ("random", "delta") and self.dim % cfg.group_count != 0:
            raise ConfigurationError(
                f"group_count {cfg.group_count} does not divide dimension {self.dim}")
        if cfg.strategy == "multilevel":
            bad = [c for c in cfg.candidate_counts if c < 1 or self.dim % c != 0]
            if bad:
                raise ConfigurationError(
                    f"multilevel candidates {bad} do not divide dimension {self.dim}")

    def next_grouping(self) -> gr.Grouping:
        cfg = self.cfg
        if cfg.strategy == "arg":
            return gr.arg_decompose(self.dim, self.rng)
        if cfg.strategy == "random":
            return gr.random_grouping(self.dim, cfg.group_count, self.rng)
        if cfg.strategy == "delta":
            return gr.delta_grouping(self.delta, cfg.group_count)
        if cfg.strategy == "multilevel":
            idx_count = gr.multilevel_select(cfg.candidate_counts, self.ml_scores, self.rng)
            self.last_ml_choice = cfg.candidate_counts.index(idx_count)
            return gr.random_grouping(self.dim, idx_count, self.rng)
        if self.fixed is None:
            if cfg.strategy == "dg":
                res = gr.dg_decompose(self.objective, cfg.epsilon, self.rng)
            else:
                res = gr.vil_decompose(self.objective, cfg.vil_samples, self.rng)
            self.fixed = res.groups
            self.decomposition_evaluations = res.evaluations
            self.decomposition_truncated = res.truncated
        return self.fixed

    def record_improvement(self, amount: float) -> None:
        if self.cfg.strategy == "multilevel" and self.last_ml_choice is not None:
            self.ml_scores[self.last_ml_choice] += max(0.0, amount)

    def update_delta(self, previous: np.ndarray, current: np.ndarray) -> None:
        if self.cfg.strategy == "delta":
            self.delta = compute_delta(previous, current)


def cc_optimize(objective: ObjectiveFunction, cfg: CcConfig,
                rng: np.random.Generator) -> CcRunResult:
    """Run cooperative coevolution until the objective's budget is exhausted."""
    ctx_rng, decomp_rng, opt_rng = rng.spawn(3)
    dim = objective.bounds.dimension
    context = ContextVector(objective.bounds.sample(ctx_rng))
    schedule = _GroupingSchedule(cfg.decomposer, objective, decomp_rng)
    tracker = BestTracker()
    trace: list[tuple[int, float, float | None]] = []
    grouping_counts: list[int] = []
    groupings_log: list[gr.Grouping] | None = [] if cfg.log_groupings else None

    def true_at_best() -> float | None:
        if not cfg.track_true or tracker.best_genome is None:
            return None
        return objective.true_value(tracker.best_genome)

    def append_trace_point() -> None:
        if tracker.best_genome is None:
            return
        if not trace or objective.consumed > trace[-1][0]:
            trace.append((objective.consumed, tracker.best_observed, true_at_best()))

    populations: dict[int, Population] = {}
    prev_grouping: gr.Grouping | None = None
    cycles = 0
    exhausted = False

    while objective.remaining > 0 and not exhausted:
        grouping = schedule.next_grouping()
        if grouping != prev_grouping:
            populations = {}
            prev_grouping = grouping
        grouping_counts.append(len(grouping))
        if groupings_log is not None:
            groupings_log.append(grouping)
        cycle_start_best = tracker.best_observed
        cycle_start_context = context.values.copy()

        for gi, group in enumerate(grouping):
            view = SubProblemView.for_group(group, context.values, objective.bounds)
            pop = populations.get(gi)
            if pop is None:
                # fresh population whenever the grouping changed; from the
                # second cycle on, the first member carries the context block
                seed = context.values[np.asarray(group, dtype=int)] if cycles > 0 else None
                try:
                    pop = init_population(view, cfg.population_size, objective, opt_rng,
                                          seed_genome=seed)
                except BudgetExhausted:
                    exhausted = True
                    break
                populations[gi] = pop
                tracker.offer_population(pop, view)
            completed = True
            for _ in range(cfg.generations_per_cycle):
                completed = run_generation(pop, view, objective, cfg.optimizer, opt_rng)
                tracker.offer_population(pop, view)
                if not completed:
                    break
            best = pop.best
            context = update_context(context, group, best.genome, best.fitness)
            append_trace_point()
            if not completed:
                exhausted = True
                break

        cycles += 1
        if math.isfinite(cycle_start_best):
            schedule.record_improvement(cycle_start_best - tracker.best_observed)
        schedule.update_delta(cycle_start_context, context.values)

    return CcRunResult(
        trace=trace,
        final_context=context.values.copy(),
        final_context_observed=context.observed_fitness,
        best_observed=tracker.best_observed,
        best_genome=tracker.best_genome,
        cycles=cycles,
        grouping_counts=grouping_counts,
        decomposition_evaluations=schedule.decomposition_evaluations,
        decomposition_truncated=schedule.decomposition_truncated,
        groupings=groupings_log,
    )
