"""Pydantic models shared by the experiment runner, the HTTP service, and
the CLI: experiment configs, run records, and comparison tables.

These are the wire formats; on-disk records use the same models so every
record re-parses and revalidates.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .objective import benchmark_info, ConfigurationError

STRATEGY_LABELS = {"arg": "aRG", "random": "G", "delta": "D",
                   "multilevel": "ML", "dg": "DG", "vil": "VIL"}
VARIANT_LABELS = {"canonical": "DECC", "mde_ds": "MDE-DSCC"}


class NoiseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["none", "additive", "multiplicative"] = "none"
    sigma: float = Field(0.1, ge=0.0)


class DecomposerSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    strategy: Literal["arg", "random", "delta", "multilevel", "dg", "vil"]
    group_count: Optional[int] = Field(None, ge=1)
    group_size: Optional[int] = Field(None, ge=1)
    candidate_counts: list[int] = Field(default=[5, 10, 25, 50])
    epsilon: float = Field(1e-3, gt=0.0)
    vil_samples: int = Field(10, ge=1)


class OptimizerSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variant: Literal["canonical", "mde_ds"] = "mde_ds"
    f_scale: float = Field(0.7, gt=0.0)
    cr: float = Field(0.9, gt=0.0, le=1.0)


class ExperimentConfig(BaseModel):
    """One experiment: an algorithm on a noisy benchmark, repeated over seeds."""

    model_config = ConfigDict(extra="forbid")

    benchmark: str
    dimension: int = Field(ge=1)
    noise: NoiseSpec = NoiseSpec()
    decomposer: DecomposerSpec
    optimizer: OptimizerSpec = OptimizerSpec()
    population_size: int = Field(50, ge=4)
    budget: int = Field(ge=0)
    generations_per_cycle: int = Field(1, ge=1)
    trial_runs: int = Field(25, ge=1)
    master_seed: Optional[int] = None
    seeds: Optional[list[int]] = None
    algorithm: Optional[str] = None       # label; derived from parts when omitted
    record_true_fitness: bool = False
    log_groupings: bool = False
    output_dir: Optional[str] = None      # used client-side by the CLI

    @model_validator(mode="after")
    def _validate(self) -> "ExperimentConfig":
        try:
            info = benchmark_info(self.benchmark)
        except ConfigurationError as exc:
            raise ValueError(f"benchmark: {exc}") from None
        if self.dimension < info.min_dimension:
            raise ValueError(f"dimension: {info.name} requires at least {info.min_dimension}")

        dec = self.decomposer
        if dec.strategy in ("random", "delta"):
            count = dec.group_count
            if count is None and dec.group_size is not None:
                if self.dimension % dec.group_size != 0:
                    raise ValueError("decomposer.group_size: must divide dimension")
                count = self.dimension // dec.group_size
            if count is None:
                raise ValueError("decomposer.group_count: required for this strategy")
            if self.dimension % count != 0:
                raise ValueError("decomposer.group_count: must divide dimension")
            if dec.group_size is not None and dec.group_size * count != self.dimension:
                raise ValueError("decomposer.group_size: group_size * group_count must equal dimension")
            dec.group_count = count
        if dec.strategy == "multilevel":
            if not dec.candidate_counts:
                raise ValueError("decomposer.candidate_counts: must be nonempty")
            bad = [c for c in dec.candidate_counts if self.dimension % c != 0]
            if bad:
                raise ValueError(f"decomposer.candidate_counts: {bad} do not divide dimension")

        if self.seeds is None and self.master_seed is None:
            raise ValueError("master_seed: either master_seed or seeds is required")
        if self.seeds is not None and len(self.seeds) < self.trial_runs:
            raise ValueError("seeds: need at least trial_runs entries")

        if self.algorithm is None:
            self.algorithm = (f"{VARIANT_LABELS[self.optimizer.variant]}-"
                              f"{STRATEGY_LABELS[dec.strategy]}")
        return self


class RunRecord(BaseModel):
    """Output of one seeded run: config echo, convergence trace, final state.

    Trace rows are (FEs consumed, best observed so far, best true or null).
    wall_clock_seconds is reported over the API but excluded from the
    on-disk file so identical seeds produce byte-identical records.
    """

    model_config = ConfigDict(extra="forbid")

    algorithm: str
    seed: int
    config: ExperimentConfig
    trace: list[tuple[int, float, Optional[float]]]
    final_context: list[float]
    final_observed: Optional[float]        # context's observed fitness
    best_observed: Optional[float]         # running minimum over observations
    total_evaluations: int
    cycles: int
    grouping_counts: list[int]
    decomposition_evaluations: int = 0
    decomposition_truncated: bool = False
    groupings: Optional[list[list[list[int]]]] = None
    wall_clock_seconds: Optional[float] = None

    def file_json(self) -> str:
        return self.model_dump_json(indent=2, exclude={"wall_clock_seconds"})


# ----------------------------------------------------------------------
# Service payloads
# ----------------------------------------------------------------------

class RunResponse(BaseModel):
    records: list[RunRecord]
    csv: str                    # combined convergence CSV


class FinalGroup(BaseModel):
    label: str
    finals: list[float]


class CompareRequest(BaseModel):
    groups: list[FinalGroup]
    alphas: list[float] = Field(default=[0.05, 0.10])

    @model_validator(mode="after")
    def _validate(self) -> "CompareRequest":
        if len(self.groups) < 2:
            raise ValueError("groups: need at least two algorithm groups")
        small = [g.label for g in self.groups if len(g.finals) < 2]
        if small:
            raise ValueError(f"groups: fewer than 2 runs in {small}")
        if any(a <= 0 or a >= 1 for a in self.alphas):
            raise ValueError("alphas: significance levels must lie in (0, 1)")
        return self


class AlgorithmSummary(BaseModel):
    label: str
    runs: int
    mean: float
    std: float
    median: float


class PairwiseTest(BaseModel):
    first: str
    second: str
    u_statistic: float
    p_raw: float
    p_holm: float
    markers: dict[str, str]     # alpha (as string) -> "*" when significant else ""


class ComparisonTable(BaseModel):
    summaries: list[AlgorithmSummary]
    kruskal_statistic: float
    kruskal_p: float
    pairwise: list[PairwiseTest]
    alphas: list[float]


class GroupSimRequest(BaseModel):
    dimension: int = Field(ge=1)
    runs: int = Field(ge=1)
    seed: int = 0


class GroupSimResponse(BaseModel):
    dimension: int
    runs: int
    count_histogram: dict[int, int]
    modal_count: int
    mean_count: float
    size_mean: float
    size_min: int
    size_max: int


class ProbCurveResponse(BaseModel):
    cycles: int
    group_count: int
    points: list[tuple[int, float]]
