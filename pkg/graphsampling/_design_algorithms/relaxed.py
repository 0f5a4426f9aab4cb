from __future__ import annotations

import math
import sys
from typing import TYPE_CHECKING

import numpy as np

from graphsampling._linalg.box_projection import project_capped_simplex
from graphsampling.config import default_solver_config

if TYPE_CHECKING:
    from graphsampling.design import DesignCriterion
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import (
        RelaxedDesign,
        SolverConfiguration,
        Vector,
        VertexSet,
    )

SMALLEST_STEP = 1e-20


def round_design(weights: Vector, samples: int) -> VertexSet:
    """
    The `samples` largest entries of `weights`; ties go to the lowest index.
    """
    order = np.argsort(-weights, kind="stable")
    return tuple(sorted(int(v) for v in order[:samples]))


def _projected_gradient(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    start: Vector,
    samples: int,
    config: SolverConfiguration,
) -> tuple[Vector, int, bool]:
    d = start
    value = criterion.relaxed_objective(basis, d)
    step = 1.0
    beta = config["armijo_beta"]
    c = config["armijo_c"]

    for iteration in range(1, config["relaxation_max_iterations"] + 1):
        gradient = criterion.relaxed_gradient(basis, d)
        step *= 2.0
        while True:
            trial = project_capped_simplex(d - step * gradient, samples)
            trial_value = criterion.relaxed_objective(basis, trial)
            if trial_value <= value + c * float(gradient @ (trial - d)):
                break
            step *= beta
            if step < SMALLEST_STEP:
                return d, iteration, False

        change = float(np.linalg.norm(trial - d))
        d, value = trial, trial_value
        if config["debug"] and iteration % 100 == 0:
            print(
                f"[relaxed] Iteration {iteration}: objective {value:.10g}, "
                f"change {change:.3e}.",
                file=sys.stderr,
            )
        if change <= config["relaxation_tolerance"]:
            return d, iteration, True

    return d, config["relaxation_max_iterations"], False


def _projected_subgradient(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    start: Vector,
    samples: int,
    config: SolverConfiguration,
) -> tuple[Vector, int, bool]:
    d = start
    best = d
    best_value = criterion.relaxed_objective(basis, d)

    for iteration in range(1, config["relaxation_max_iterations"] + 1):
        gradient = criterion.relaxed_gradient(basis, d)
        norm = float(np.linalg.norm(gradient))
        if norm == 0.0:
            return best, iteration, True
        step = config["subgradient_step"] / math.sqrt(iteration)
        trial = project_capped_simplex(d - step * gradient / norm, samples)
        change = float(np.linalg.norm(trial - d))
        d = trial

        value = criterion.relaxed_objective(basis, d)
        if value < best_value:
            best, best_value = d, value
        if config["debug"] and iteration % 500 == 0:
            print(
                f"[relaxed] Iteration {iteration}: best objective {best_value:.10g}.",
                file=sys.stderr,
            )
        if change <= config["relaxation_tolerance"]:
            return best, iteration, True

    return best, config["relaxation_max_iterations"], False


def relaxed_select(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    samples: int,
    config: SolverConfiguration | None = None,
) -> tuple[RelaxedDesign, VertexSet]:
    """
    See `graphsampling.design.relaxed_select` for documentation.
    """
    if config is None:
        config = default_solver_config()

    n = basis.n
    if samples < 1 or samples > n:
        raise ValueError(f"Cannot select {samples} of {n} vertices.")

    if samples == n:
        weights = np.ones(n)
        iterations, converged = 0, True
    else:
        start = np.full(n, samples / n)
        if criterion.kind == "E":
            weights, iterations, converged = _projected_subgradient(
                criterion, basis, start, samples, config
            )
        else:
            weights, iterations, converged = _projected_gradient(
                criterion, basis, start, samples, config
            )

    rounded = round_design(weights, samples)
    design: RelaxedDesign = {
        "weights": weights,
        "samples": samples,
        "iterations": iterations,
        "relaxed_objective": criterion.relaxed_objective(basis, weights),
        "objective": criterion.objective(basis, rounded, config["rank_threshold"]),
        "converged": converged,
    }
    if config["debug"]:
        print(
            f"[relaxed] {criterion.kind}-design finished after {iterations} iterations "
            f"(converged={converged}); rounded set {rounded}.",
            file=sys.stderr,
        )
    return design, rounded
