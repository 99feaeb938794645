"""HTTP service wrapping the core package.

Experiments run synchronously inside the request; clients own all file
I/O, so the service is a stateless compute endpoint.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .analysis import probability_curve, simulate_arg
from .experiment import compare_finals, records_to_csv, run_experiment
from .schemas import (
    CompareRequest,
    ComparisonTable,
    ExperimentConfig,
    GroupSimRequest,
    GroupSimResponse,
    ProbCurveResponse,
    RunResponse,
)

app = FastAPI(title="noisycc service", version=__version__)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/run", response_model=RunResponse)
def run(config: ExperimentConfig) -> RunResponse:
    try:
        records = run_experiment(config)
    except ValueError as exc:  # core-level configuration problems
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return RunResponse(records=records, csv=records_to_csv(records))


@app.post("/compare", response_model=ComparisonTable)
def compare(request: CompareRequest) -> ComparisonTable:
    return compare_finals(request.groups, request.alphas)


@app.post("/groupsim", response_model=GroupSimResponse)
def groupsim(request: GroupSimRequest) -> GroupSimResponse:
    stats = simulate_arg(request.dimension, request.runs,
                         np.random.default_rng(request.seed))
    return GroupSimResponse(
        dimension=stats.dimension,
        runs=stats.runs,
        count_histogram=stats.count_histogram,
        modal_count=stats.modal_count,
        mean_count=stats.mean_count,
        size_mean=stats.size_mean,
        size_min=stats.size_min,
        size_max=stats.size_max,
    )


@app.get("/probcurve", response_model=ProbCurveResponse)
def probcurve(cycles: int, groups: int, k_max: int | None = None) -> ProbCurveResponse:
    if k_max is None:
        k_max = cycles
    try:
        points = probability_curve(cycles, groups, k_max)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return ProbCurveResponse(cycles=cycles, group_count=groups, points=points)
