"""Experiment execution: seeded runs from a validated config, record and
CSV persistence, and the comparison table over final fitnesses."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from pathlib import Path

import numpy as np

from .analysis import holm_adjust, kruskal_wallis, mann_whitney_u
from .ccdriver import CcConfig, cc_optimize
from .grouping import DecomposerConfig
from .objective import NoiseModel, ObjectiveFunction
from .optimizer import DeParams
from .schemas import (
    AlgorithmSummary,
    ComparisonTable,
    ExperimentConfig,
    FinalGroup,
    PairwiseTest,
    RunRecord,
)

CSV_HEADER = ["algorithm", "seed", "FEs", "best_observed", "best_true"]


def build_objective(config: ExperimentConfig) -> ObjectiveFunction:
    return ObjectiveFunction(
        benchmark=config.benchmark,
        dimension=config.dimension,
        budget=config.budget,
        noise=NoiseModel(config.noise.kind, config.noise.sigma),
    )


def build_cc_config(config: ExperimentConfig) -> CcConfig:
    dec = config.decomposer
    return CcConfig(
        decomposer=DecomposerConfig(
            strategy=dec.strategy,
            group_count=dec.group_count,
            candidate_counts=tuple(dec.candidate_counts),
            epsilon=dec.epsilon,
            vil_samples=dec.vil_samples,
        ),
        optimizer=DeParams(config.optimizer.variant, config.optimizer.f_scale,
                           config.optimizer.cr),
        population_size=config.population_size,
        generations_per_cycle=config.generations_per_cycle,
        track_true=config.record_true_fitness,
        log_groupings=config.log_groupings,
    )


def seed_plan(config: ExperimentConfig) -> list[tuple[int, np.random.SeedSequence]]:
    """Per-run (label, seed material) pairs.

    Explicit seeds are used directly. A master seed is split with spawn
    keys so adding runs later never perturbs the existing ones.
    """
    if config.seeds is not None:
        return [(s, np.random.SeedSequence(s)) for s in config.seeds[:config.trial_runs]]
    master = np.random.SeedSequence(config.master_seed)
    return list(zip(range(config.trial_runs), master.spawn(config.trial_runs)))


def _clean(value: float) -> float | None:
    return None if not math.isfinite(value) else float(value)


def run_single(config: ExperimentConfig, seed_label: int,
               seed_seq: np.random.SeedSequence) -> RunRecord:
    objective = build_objective(config)
    rng = np.random.default_rng(seed_seq)
    started = time.perf_counter()
    result = cc_optimize(objective, build_cc_config(config), rng)
    elapsed = time.perf_counter() - started
    return RunRecord(
        algorithm=config.algorithm,
        seed=seed_label,
        config=config,
        trace=[(fes, obs, true) for fes, obs, true in result.trace],
        final_context=[float(v) for v in result.final_context],
        final_observed=_clean(result.final_context_observed),
        best_observed=_clean(result.best_observed),
        total_evaluations=objective.consumed,
        cycles=result.cycles,
        grouping_counts=result.grouping_counts,
        decomposition_evaluations=result.decomposition_evaluations,
        decomposition_truncated=result.decomposition_truncated,
        groupings=result.groupings,
        wall_clock_seconds=elapsed,
    )


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    return [run_single(config, label, seq) for label, seq in seed_plan(config)]


def records_to_csv(records: list[RunRecord]) -> str:
    """Combined convergence CSV: one row per trace point per run."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        for fes, best_obs, best_true in rec.trace:
            writer.writerow([rec.algorithm, rec.seed, fes, repr(best_obs),
                             "" if best_true is None else repr(best_true)])
    return buf.getvalue()


def write_records(records: list[RunRecord], out_dir: str | Path) -> list[Path]:
    """One JSON record per run plus the combined convergence CSV and a
    timing sidecar (timings are the only non-deterministic output)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i, rec in enumerate(records):
        path = out / f"run_{i:03d}.json"
        path.write_text(rec.file_json())
        written.append(path)
    csv_path = out / "convergence.csv"
    csv_path.write_text(records_to_csv(records))
    written.append(csv_path)
    timings = {f"run_{i:03d}": rec.wall_clock_seconds for i, rec in enumerate(records)}
    (out / "timings.json").write_text(json.dumps(timings, indent=2))
    return written


def load_record(path: str | Path) -> RunRecord:
    return RunRecord.model_validate_json(Path(path).read_text())


def final_fitnesses_from_csv(csv_path: str | Path) -> dict[str, list[float]]:
    """Final best-observed fitness per run, grouped by algorithm label.

    The final value of a run is the best_observed of its trace row with
    the largest FE count. The CSV is the single source; nothing is re-run.
    """
    last: dict[tuple[str, str], tuple[int, float]] = {}
    order: list[tuple[str, str]] = []
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["algorithm"], row["seed"])
            fes = int(row["FEs"])
            if key not in last:
                order.append(key)
                last[key] = (fes, float(row["best_observed"]))
            elif fes > last[key][0]:
                last[key] = (fes, float(row["best_observed"]))
    finals: dict[str, list[float]] = {}
    for key in order:
        finals.setdefault(key[0], []).append(last[key][1])
    return finals


def compare_finals(groups: list[FinalGroup], alphas: list[float]) -> ComparisonTable:
    """Mean/std table, Kruskal-Wallis across all groups, and pairwise
    Mann-Whitney tests with Holm adjustment and significance markers."""
    summaries = []
    for g in groups:
        values = np.asarray(g.finals, dtype=float)
        summaries.append(AlgorithmSummary(
            label=g.label,
            runs=values.size,
            mean=float(values.mean()),
            std=float(values.std(ddof=1)),
            median=float(np.median(values)),
        ))
    kw = kruskal_wallis([g.finals for g in groups])
    pairs = [(i, j) for i in range(len(groups)) for j in range(i + 1, len(groups))]
    raw = []
    stats = []
    for i, j in pairs:
        res = mann_whitney_u(groups[i].finals, groups[j].finals)
        raw.append(res.p_value)
        stats.append(res.statistic)
    adjusted = holm_adjust(raw)
    pairwise = []
    for (i, j), u, p_raw, p_holm in zip(pairs, stats, raw, adjusted):
        markers = {repr(a): ("*" if p_holm < a else "") for a in alphas}
        pairwise.append(PairwiseTest(first=groups[i].label, second=groups[j].label,
                                     u_statistic=u, p_raw=p_raw, p_holm=p_holm,
                                     markers=markers))
    return ComparisonTable(summaries=summaries, kruskal_statistic=kw.statistic,
                           kruskal_p=kw.p_value, pairwise=pairwise, alphas=list(alphas))
