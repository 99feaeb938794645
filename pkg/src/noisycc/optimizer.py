"""Population engines: canonical DE and a modified DE built for noisy fitness.

The modified variant (``mde_ds``) redraws its control parameters per
operation, mixes an elite-centroid mutation with a random-direction step
scaled by dimension-wise means, blends parent and donor during crossover,
and accepts worse trials with probability exp(-df/dis) where dis is the
Manhattan distance between parent and trial. Both engines operate on a
sub-problem view that completes candidates with a shared context vector
before evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .objective import (
    Bounds,
    BudgetExhausted,
    ConfigurationError,
    ObjectiveFunction,
    clamp_to_bounds,
)

_BLEND_CHOICES = np.array([0.1, 0.5, 0.9])


@dataclass
class DeParams:
    variant: str = "mde_ds"      # "canonical" | "mde_ds"
    f_scale: float = 0.7         # canonical scale factor
    cr: float = 0.9              # canonical crossover rate

    def __post_init__(self):
        if self.variant not in ("canonical", "mde_ds"):
            raise ConfigurationError(f"unknown optimizer variant {self.variant!r}")


@dataclass
class Individual:
    genome: np.ndarray
    fitness: float   # latest noisy observation for this genome


class Population:
    """Fixed-size set of individuals; best has the minimal observed fitness."""

    def __init__(self, members: list[Individual]):
        if not members:
            raise ConfigurationError("population must be nonempty")
        self.members = members

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def fitness_values(self) -> np.ndarray:
        return np.array([m.fitness for m in self.members])

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.fitness_values))

    @property
    def best(self) -> Individual:
        return self.members[self.best_index]


@dataclass
class SubProblemView:
    """A group of dimension indices plus the context used to complete candidates."""

    group: list[int]
    context: np.ndarray        # full-dimensional context values
    bounds: Bounds             # restricted to the group
    _indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._indices = np.asarray(self.group, dtype=int)
        if self._indices.size != self.bounds.dimension:
            raise ConfigurationError("view bounds must match the group size")

    @classmethod
    def for_group(cls, group: list[int], context: np.ndarray, full_bounds: Bounds) -> "SubProblemView":
        return cls(list(group), context, full_bounds.restrict(group))

    def compose(self, genome: np.ndarray) -> np.ndarray:
        full = np.array(self.context, dtype=float, copy=True)
        full[self._indices] = genome
        return full

    def evaluate(self, genome: np.ndarray, objective: ObjectiveFunction,
                 rng: np.random.Generator) -> float:
        return objective.evaluate_noisy(self.compose(genome), rng)


def full_view(objective: ObjectiveFunction) -> SubProblemView:
    """Degenerate single-group view covering every dimension."""
    dim = objective.bounds.dimension
    return SubProblemView(list(range(dim)), np.zeros(dim), objective.bounds)


# ----------------------------------------------------------------------
# Modified-DE operators
# ----------------------------------------------------------------------

def _distinct_indices(size: int, forbidden: set[int], count: int,
                      rng: np.random.Generator) -> list[int]:
    picked: list[int] = []
    taken = set(forbidden)
    while len(picked) < count:
        r = int(rng.integers(size))
        if r not in taken:
            picked.append(r)
            taken.add(r)
    return picked


def mdeds_mutate_centroid(pop: Population, i: int, rng: np.random.Generator) -> np.ndarray:
    """Donor = X_r1 + F * (elite centroid - X_r2), F ~ U(0.5, 2) per call.

    The elite is the top 50% (ceil of half) of the population by observed
    fitness; the centroid is its unweighted mean.
    """
    s = pop.size
    if s < 4:
        raise ConfigurationError("centroid mutation needs a population of at least 4")
    elite_count = math.ceil(s / 2)
    order = np.argsort(pop.fitness_values, kind="stable")
    centroid = np.mean([pop.members[int(k)].genome for k in order[:elite_count]], axis=0)
    f = rng.uniform(0.5, 2.0)
    r1, r2 = _distinct_indices(s, {i}, 2, rng)
    return pop.members[r1].genome + f * (centroid - pop.members[r2].genome)


def mdeds_mutate_dmp(pop: Population, i: int, rng: np.random.Generator) -> np.ndarray:
    """Step from the target along a random unit direction, scaled by the
    difference of the dimension-wise means of the best and target genomes."""
    best = pop.best.genome
    target = pop.members[i].genome
    delta_m = float(best.mean() - target.mean())
    direction = rng.standard_normal(target.size)
    norm = float(np.linalg.norm(direction))
    while norm == 0.0:  # probability-zero guard
        direction = rng.standard_normal(target.size)
        norm = float(np.linalg.norm(direction))
    return target + delta_m * (direction / norm)


def mdeds_crossover(target: np.ndarray, donor: np.ndarray,
                    rng: np.random.Generator) -> np.ndarray:
    """Blending crossover: u_j = b*x_j + (1-b)*v_j with probability Cr, else x_j.

    Cr ~ U(0.3, 1) and b in {0.1, 0.5, 0.9} are drawn once per target
    vector; one uniformly chosen dimension always takes the blended value.
    """
    if target.size != donor.size:
        raise ValueError("target and donor lengths differ")
    cr = rng.uniform(0.3, 1.0)
    b = float(_BLEND_CHOICES[rng.integers(3)])
    j_rand = int(rng.integers(target.size))
    mask = rng.random(target.size) < cr
    mask[j_rand] = True
    return np.where(mask, b * target + (1.0 - b) * donor, target)


def mdeds_select(parent: Individual, trial: Individual,
                 rng: np.random.Generator) -> Individual:
    """Distance-based selection.

    The trial survives outright when its observed fitness is no worse.
    A worse trial survives with probability exp(-df/dis), df the absolute
    observed difference, dis the Manhattan distance between the genomes;
    dis = 0 with df > 0 keeps the parent.
    """
    p_s = rng.uniform()
    if trial.fitness <= parent.fitness:
        return trial
    dis = float(np.abs(trial.genome - parent.genome).sum())
    if dis == 0.0:
        return parent
    delta_f = abs(trial.fitness - parent.fitness)
    if p_s <= math.exp(-delta_f / dis):
        return trial
    return parent


def mdeds_generation(pop: Population, view: SubProblemView, objective: ObjectiveFunction,
                     rng: np.random.Generator) -> bool:
    """One modified-DE generation over the population, in member order.

    Each member picks centroid or direction mutation with a fair coin,
    crosses over, is clamped into the box, evaluated through the context,
    and competes via distance-based selection. Returns False when the
    budget ran out mid-generation; processed members keep their results.
    """
    for i in range(pop.size):
        target = pop.members[i]
        if rng.uniform() <= 0.5:
            donor = mdeds_mutate_centroid(pop, i, rng)
        else:
            donor = mdeds_mutate_dmp(pop, i, rng)
        trial_genome = clamp_to_bounds(mdeds_crossover(target.genome, donor, rng), view.bounds)
        try:
            trial_fitness = view.evaluate(trial_genome, objective, rng)
        except BudgetExhausted:
            return False
        pop.members[i] = mdeds_select(target, Individual(trial_genome, trial_fitness), rng)
    return True


# ----------------------------------------------------------------------
# Canonical DE
# ----------------------------------------------------------------------

def de_mutate_rand1(pop: Population, i: int, f_scale: float,
                    rng: np.random.Generator) -> np.ndarray:
    if pop.size < 4:
        raise ConfigurationError("DE/rand/1 needs a population of at least 4")
    r1, r2, r3 = _distinct_indices(pop.size, {i}, 3, rng)
    return pop.members[r1].genome + f_scale * (pop.members[r2].genome - pop.members[r3].genome)


def de_crossover_binomial(target: np.ndarray, donor: np.ndarray, cr: float,
                          rng: np.random.Generator) -> np.ndarray:
    j_rand = int(rng.integers(target.size))
    mask = rng.random(target.size) < cr
    mask[j_rand] = True
    return np.where(mask, donor, target)


def de_generation(pop: Population, view: SubProblemView, objective: ObjectiveFunction,
                  params: DeParams, rng: np.random.Generator) -> bool:
    """One DE/rand/1/bin generation with greedy selection on observed fitness."""
    for i in range(pop.size):
        target = pop.members[i]
        donor = de_mutate_rand1(pop, i, params.f_scale, rng)
        trial_genome = clamp_to_bounds(de_crossover_binomial(target.genome, donor, params.cr, rng),
                                       view.bounds)
        try:
            trial_fitness = view.evaluate(trial_genome, objective, rng)
        except BudgetExhausted:
            return False
        if trial_fitness <= target.fitness:
            pop.members[i] = Individual(trial_genome, trial_fitness)
    return True


def run_generation(pop: Population, view: SubProblemView, objective: ObjectiveFunction,
                   params: DeParams, rng: np.random.Generator) -> bool:
    if params.variant == "canonical":
        return de_generation(pop, view, objective, params, rng)
    return mdeds_generation(pop, view, objective, rng)


# ----------------------------------------------------------------------
# Population setup and standalone runs
# ----------------------------------------------------------------------

def init_population(view: SubProblemView, size: int, objective: ObjectiveFunction,
                    rng: np.random.Generator,
                    seed_genome: np.ndarray | None = None) -> Population:
    """Uniform random population inside the view's box, evaluated through the
    context (one FE per member). When ``seed_genome`` is given it replaces
    the first member, without changing the stream of random draws."""
    if size < 1:
        raise ConfigurationError("population size must be positive")
    genomes = rng.uniform(view.bounds.lower, view.bounds.upper,
                          size=(size, view.bounds.dimension))
    if seed_genome is not None:
        genomes[0] = np.asarray(seed_genome, dtype=float)
    members = []
    for k in range(size):
        members.append(Individual(genomes[k], view.evaluate(genomes[k], objective, rng)))
    return Population(members)


class BestTracker:
    """Running minimum over observed evaluations, keeping the full-dimensional
    genome that achieved it."""

    def __init__(self):
        self.best_observed = math.inf
        self.best_genome: np.ndarray | None = None

    def offer(self, fitness: float, full_genome: np.ndarray) -> None:
        if fitness < self.best_observed:
            self.best_observed = float(fitness)
            self.best_genome = np.array(full_genome, copy=True)

    def offer_population(self, pop: Population, view: SubProblemView) -> None:
        best = pop.best
        self.offer(best.fitness, view.compose(best.genome))


@dataclass
class OptimizeResult:
    # trace rows: (FEs consumed, best observed so far, best true or None)
    trace: list[tuple[int, float, float | None]]
    best_observed: float
    best_genome: np.ndarray | None
    generations: int
    population: Population | None = None


def optimize(objective: ObjectiveFunction, params: DeParams, population_size: int,
             rng: np.random.Generator, max_generations: int | None = None,
             track_true: bool = False) -> OptimizeResult:
    """Run one engine on the full problem until the budget (or generation cap)
    is reached, recording one trace point per generation."""
    view = full_view(objective)
    tracker = BestTracker()
    trace: list[tuple[int, float, float | None]] = []

    def true_at_best() -> float | None:
        if not track_true or tracker.best_genome is None:
            return None
        return objective.true_value(tracker.best_genome)

    try:
        pop = init_population(view, population_size, objective, rng)
    except BudgetExhausted:
        return OptimizeResult([], math.inf, None, 0, None)
    tracker.offer_population(pop, view)

    generations = 0
    while objective.remaining > 0 and (max_generations is None or generations < max_generations):
        completed = run_generation(pop, view, objective, params, rng)
        tracker.offer_population(pop, view)
        generations += 1
        if not trace or objective.consumed > trace[-1][0]:
            trace.append((objective.consumed, tracker.best_observed, true_at_best()))
        if not completed:
            break
    return OptimizeResult(trace, tracker.best_observed, tracker.best_genome, generations, pop)
