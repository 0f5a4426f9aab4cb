"""
Batch reconstruction of bandlimited graph signals from samples.

A bandlimited signal `x = U_F s` is perfectly recoverable from its samples on
`S` iff `||D_Sc U_F|| < 1`, equivalently iff the sampled rows `U_S` of `U_F`
have full column rank. This module implements the consistent (least
squares) reconstruction, the best linear unbiased estimator under
heteroscedastic noise together with its mean square error, the worst-case
error bound for approximately bandlimited signals, and robust recovery from
observations corrupted on a sparse set of vertices by least absolute
deviations.
"""

from __future__ import annotations

import math
import sys
from typing import TYPE_CHECKING

import numpy as np

from graphsampling._linalg.dense import (
    numerical_rank,
    pseudo_inverse,
    smallest_singular_value,
    spectral_norm,
)
from graphsampling._linalg.l1_admm import least_absolute_deviations
from graphsampling.config import default_solver_config
from graphsampling.errors import RecoveryConditionError
from graphsampling.seeding import SeedLike, make_generator
from graphsampling.spectral import split_bandlimited
from graphsampling.vertex_utils import complement, make_vertex_set

if TYPE_CHECKING:
    from graphsampling.noise import NoiseModel
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import (
        Matrix,
        MismatchBound,
        MonteCarloSummary,
        ObservationBatch,
        RecoveryCondition,
        RecoveryReport,
        SolverConfiguration,
        Vector,
        VertexSet,
    )

CONDITION_MARGIN = 1e-9
ORTHOGONAL_SUBSPACES = 1e-12
POLISH_THRESHOLD = 1e-5


def recovery_condition(
    basis: SpectralBasis, vertices: VertexSet, threshold: float = 1e-10
) -> RecoveryCondition:
    """
    Check whether the samples on `vertices` determine every bandlimited signal.

    Parameters
    ----------
    basis : SpectralBasis
        The basis and its frequency set.
    vertices : VertexSet
        The sampling set.
    threshold : float
        Relative singular value threshold of the rank test.

    Returns
    -------
    RecoveryCondition
        `norm = ||D_Sc U_F||`, `ok` iff `norm < 1 - 1e-9`, and `rank_ok` iff
        `U_S` has rank `|F|`.

    Example
    -------
    >>> from graphsampling.graph_utils import generate_graph, shift_operator
    >>> from graphsampling.spectral import spectral_decompose
    >>> basis = spectral_decompose(shift_operator(generate_graph("path(3)")), frequencies=[0])
    >>> recovery_condition(basis, (1,))["ok"]
    True
    """
    rest = complement(vertices, basis.n)
    norm = spectral_norm(basis.U_F[list(rest), :])
    ok = norm < 1.0 - CONDITION_MARGIN
    rank_ok = numerical_rank(basis.U_F[list(vertices), :], threshold) == basis.bandwidth
    if ok and not rank_ok:
        raise RuntimeError("Recovery condition holds without full column rank.")
    return {"ok": ok, "norm": norm, "rank_ok": rank_ok}


def _require_condition(basis: SpectralBasis, vertices: VertexSet) -> None:
    condition = recovery_condition(basis, vertices)
    if not condition["ok"]:
        raise RecoveryConditionError(
            f"Samples on {len(vertices)} vertices do not determine "
            f"{basis.bandwidth} frequencies",
            condition["norm"],
        )


def sampling_condition(basis: SpectralBasis, vertices: VertexSet) -> float:
    """
    `sigma_min(D_S U_F)`, the cosine of the largest angle between the
    bandlimited and the vertex-limited subspace.
    """
    return smallest_singular_value(basis.U_F[list(vertices), :])


def observe_batch(
    x: Vector,
    vertices: VertexSet,
    noise: NoiseModel | None = None,
    seed: SeedLike = None,
) -> ObservationBatch:
    """
    Sample a signal on `vertices`, adding Gaussian noise when a noise model is
    given.
    """
    x = np.asarray(x, dtype=np.float64)
    vertices = make_vertex_set(vertices, len(x))
    values = x[list(vertices)].copy()
    if noise is not None:
        values += noise.sample(make_generator(seed))[list(vertices)]
    return {"samples": vertices, "values": values, "noise": noise}


def _check_batch(basis: SpectralBasis, obs: ObservationBatch) -> tuple[list[int], Vector]:
    vertices = list(make_vertex_set(obs["samples"], basis.n))
    values = np.asarray(obs["values"], dtype=np.float64)
    if values.shape != (len(vertices),):
        raise ValueError(
            f"Expected {len(vertices)} observations, got shape {values.shape}."
        )
    return vertices, values


def consistent_reconstruct(
    basis: SpectralBasis, obs: ObservationBatch
) -> RecoveryReport:
    """
    The consistent reconstruction `x = U_F (P_S^T U_F)^+ y_S`.

    For a noiseless bandlimited signal the reconstruction is exact, and in
    general it keeps the observed samples unchanged.

    Raises
    ------
    RecoveryConditionError
        If the samples do not determine the bandlimited signals.
    """
    vertices, values = _check_batch(basis, obs)
    _require_condition(basis, tuple(vertices))
    rows = basis.U_F[vertices, :]
    coefficients = pseudo_inverse(rows) @ values
    return {
        "signal": basis.U_F @ coefficients,
        "coefficients": coefficients,
        "condition": smallest_singular_value(rows),
        "theoretical_mse": None,
        "method": "consistent",
        "converged": True,
    }


def _normal_matrix(basis: SpectralBasis, vertices: list[int], weights: Vector) -> Matrix:
    rows = basis.U_F[vertices, :]
    return rows.T @ (rows * weights[:, None])


def blue_reconstruct(basis: SpectralBasis, obs: ObservationBatch) -> RecoveryReport:
    """
    The best linear unbiased estimator
    `s = (U_S^T R_S^-1 U_S)^-1 U_S^T R_S^-1 y_S` under the noise model of the
    batch. With equal variances it coincides with :func:`consistent_reconstruct`.

    Raises
    ------
    ValueError
        If the batch carries no noise model or a sampled variance is zero.
    RecoveryConditionError
        If the samples do not determine the bandlimited signals.
    """
    vertices, values = _check_batch(basis, obs)
    noise = obs["noise"]
    if noise is None:
        raise ValueError("The best linear unbiased estimator needs a noise model.")
    if not noise.is_positive(tuple(vertices)):
        raise ValueError("Noise variances must be positive on every sampled vertex.")
    _require_condition(basis, tuple(vertices))

    weights = 1.0 / noise.restrict(tuple(vertices))
    normal = _normal_matrix(basis, vertices, weights)
    try:
        coefficients = np.linalg.solve(normal, basis.U_F[vertices, :].T @ (weights * values))
        covariance = np.linalg.inv(normal)
    except np.linalg.LinAlgError:
        raise ValueError("The normal matrix of the estimator is singular.") from None

    return {
        "signal": basis.U_F @ coefficients,
        "coefficients": coefficients,
        "condition": smallest_singular_value(basis.U_F[vertices, :]),
        "theoretical_mse": float(np.trace(covariance)),
        "method": "blue",
        "converged": True,
    }


def theoretical_mse(basis: SpectralBasis, vertices: VertexSet, noise: NoiseModel) -> float:
    """
    The mean square error of the best linear unbiased estimator under
    uncorrelated noise, `Tr[(sum_{i in S} u_i u_i^T / r_i^2)^-1]`, where
    `u_i` is the `i`-th row of `U_F`.

    Example
    -------
    >>> from graphsampling.graph_utils import generate_graph, shift_operator
    >>> from graphsampling.noise import NoiseModel
    >>> from graphsampling.spectral import spectral_decompose
    >>> basis = spectral_decompose(shift_operator(generate_graph("path(1)")))
    >>> theoretical_mse(basis, (0,), NoiseModel([0.25]))
    0.25
    """
    vertices = make_vertex_set(vertices, basis.n)
    if not noise.is_positive(vertices):
        raise ValueError("Noise variances must be positive on every sampled vertex.")
    _require_condition(basis, vertices)
    normal = _normal_matrix(basis, list(vertices), 1.0 / noise.restrict(vertices))
    try:
        return float(np.trace(np.linalg.inv(normal)))
    except np.linalg.LinAlgError:
        raise ValueError("The information matrix is singular.") from None


def theoretical_mse_general(
    basis: SpectralBasis, vertices: VertexSet, covariance: Matrix
) -> float:
    """
    The mean square error of the best linear unbiased estimator under an
    arbitrary noise covariance `R`:
    `Tr[(U_F^T P_S (P_S^T R P_S)^-1 P_S^T U_F)^-1]`.
    """
    vertices = make_vertex_set(vertices, basis.n)
    covariance = np.asarray(covariance, dtype=np.float64)
    if covariance.shape != (basis.n, basis.n):
        raise ValueError(f"Expected a {basis.n}x{basis.n} covariance matrix.")
    _require_condition(basis, vertices)
    index = list(vertices)
    rows = basis.U_F[index, :]
    restricted = covariance[np.ix_(index, index)]
    try:
        normal = rows.T @ np.linalg.solve(restricted, rows)
        return float(np.trace(np.linalg.inv(normal)))
    except np.linalg.LinAlgError:
        raise ValueError("The restricted covariance or normal matrix is singular.") from None


def mismatch_bound(basis: SpectralBasis, vertices: VertexSet, x: Vector) -> MismatchBound:
    """
    The worst-case error of the consistent reconstruction of an approximately
    bandlimited signal `x = B_F x + dx` from its noiseless samples,
    `||dx|| / cos(theta_max)` with `cos(theta_max) = sigma_min(D_S U_F)`.

    Raises
    ------
    RecoveryConditionError
        If `cos(theta_max) <= 1e-12`.
    RuntimeError
        If the computed reconstruction error exceeds the bound.
    """
    vertices = make_vertex_set(vertices, basis.n)
    _, delta = split_bandlimited(basis, x)
    cos_theta = sampling_condition(basis, vertices)
    if cos_theta <= ORTHOGONAL_SUBSPACES:
        raise RecoveryConditionError(
            "The sampled and the bandlimited subspaces are orthogonal",
            spectral_norm(basis.U_F[list(complement(vertices, basis.n)), :]),
        )
    delta_norm = float(np.linalg.norm(delta))
    bound = delta_norm / cos_theta

    batch = observe_batch(x, vertices)
    estimate = consistent_reconstruct(basis, batch)["signal"]
    observed = float(np.linalg.norm(estimate - np.asarray(x, dtype=np.float64)))
    if observed > bound + 1e-9:
        raise RuntimeError(f"Reconstruction error {observed} exceeds the bound {bound}.")
    return {
        "bound": bound,
        "cos_theta": cos_theta,
        "delta_norm": delta_norm,
        "observed_error": observed,
    }


def _l1_objective(rows: Matrix, coefficients: Vector, y: Vector) -> float:
    return float(np.sum(np.abs(y - rows @ coefficients)))


def l1_reconstruct(
    basis: SpectralBasis, y: Vector, config: SolverConfiguration | None = None
) -> RecoveryReport:
    """
    Robust reconstruction from a full observation `y` that may be corrupted
    on a few vertices: `x = U_F s*` with `s*` minimizing `||y - U_F s||_1`.

    The problem is solved by ADMM. The ADMM solution is then polished by a
    least squares fit on the vertices with (numerically) zero residual; the
    polished coefficients are kept if they do not increase the l1 residual.
    A result whose ADMM run hit the iteration cap has `converged=False`.
    """
    if config is None:
        config = default_solver_config()
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (basis.n,):
        raise ValueError(f"Expected an observation of length {basis.n}, got {y.shape}.")

    rows = basis.U_F
    coefficients, converged, iterations = least_absolute_deviations(
        rows,
        y,
        rho=config["admm_rho"],
        relaxation=config["admm_relaxation"],
        tolerance=config["admm_tolerance"],
        max_iterations=config["admm_max_iterations"],
        debug=config["debug"],
    )

    residual = np.abs(y - rows @ coefficients)
    scale = max(1.0, float(np.max(np.abs(y))))
    support = np.flatnonzero(residual <= POLISH_THRESHOLD * scale)
    if numerical_rank(rows[support, :]) == basis.bandwidth:
        polished = pseudo_inverse(rows[support, :]) @ y[support]
        if _l1_objective(rows, polished, y) <= _l1_objective(rows, coefficients, y):
            coefficients = polished

    if config["debug"]:
        print(
            f"[l1] ADMM stopped after {iterations} iterations (converged={converged}); "
            f"{len(support)} vertices fit exactly.",
            file=sys.stderr,
        )
    return {
        "signal": rows @ coefficients,
        "coefficients": coefficients,
        "condition": 1.0,
        "theoretical_mse": None,
        "method": "l1",
        "converged": converged,
    }


def coherence(basis: SpectralBasis) -> float:
    """
    The largest magnitude of an entry of an in-band eigenvector.
    """
    return float(np.max(np.abs(basis.U_F)))


def l1_recovery_bound(basis: SpectralBasis) -> float:
    """
    The number of arbitrarily corrupted vertices below which l1 recovery is
    exact, `1 / (2 mu^2 |F|)` with `mu` the :func:`coherence`. The bound is
    reported as-is, without flooring.

    Example
    -------
    >>> from graphsampling.graph_utils import generate_graph, shift_operator
    >>> from graphsampling.spectral import spectral_decompose
    >>> op = shift_operator(generate_graph("complete(2)"))
    >>> basis = spectral_decompose(op, frequencies=[0])
    >>> round(l1_recovery_bound(basis), 10)
    1.0
    """
    mu = coherence(basis)
    return 1.0 / (2.0 * mu * mu * basis.bandwidth)


def corrupt_signal(
    x: Vector,
    count: int,
    magnitude: float,
    seed: SeedLike = None,
    one_sided: bool = False,
) -> tuple[Vector, VertexSet]:
    """
    Add impulsive errors of size `magnitude` to `count` random vertices.

    Error signs are random unless `one_sided` is set, in which case every
    error is positive.

    Returns
    -------
    tuple[Vector, VertexSet]
        The corrupted signal and the corrupted vertices.
    """
    x = np.asarray(x, dtype=np.float64)
    if count < 0 or count > len(x):
        raise ValueError(f"Cannot corrupt {count} of {len(x)} vertices.")
    generator = make_generator(seed)
    chosen = generator.choice(len(x), size=count, replace=False)
    vertices = tuple(sorted(int(v) for v in chosen))
    signs = np.ones(count) if one_sided else generator.choice([-1.0, 1.0], size=count)
    corrupted = x.copy()
    corrupted[list(vertices)] += magnitude * signs
    return corrupted, vertices


def nmse(estimate: Vector, x: Vector) -> float:
    """
    The normalized squared error `||estimate - x||^2 / ||x||^2` (the plain
    squared error when `x` is zero).
    """
    error = float(np.sum((np.asarray(estimate) - np.asarray(x)) ** 2))
    energy = float(np.sum(np.asarray(x) ** 2))
    return error / energy if energy > 0.0 else error


def monte_carlo_blue(
    basis: SpectralBasis,
    x: Vector,
    vertices: VertexSet,
    noise: NoiseModel,
    trials: int,
    seed: SeedLike = None,
    chunk: int = 10_000,
) -> MonteCarloSummary:
    """
    Empirical mean square error and mean of the best linear unbiased estimator
    over `trials` noisy observations of `x` on `vertices`.
    """
    vertices = make_vertex_set(vertices, basis.n)
    _require_condition(basis, vertices)
    index = list(vertices)
    weights = 1.0 / noise.restrict(vertices)
    rows = basis.U_F[index, :]
    deviations = np.sqrt(noise.restrict(vertices))
    gain = basis.U_F @ np.linalg.solve(_normal_matrix(basis, index, weights), rows.T * weights)

    x = np.asarray(x, dtype=np.float64)
    generator = make_generator(seed)
    errors = np.empty(trials)
    total = np.zeros(basis.n)
    total_squares = np.zeros(basis.n)
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        draws = generator.standard_normal((size, len(index))) * deviations
        estimates = (x[index] + draws) @ gain.T
        errors[done : done + size] = np.sum((estimates - x) ** 2, axis=1)
        total += estimates.sum(axis=0)
        total_squares += (estimates**2).sum(axis=0)
        done += size

    mean = total / trials
    variance = np.maximum(total_squares / trials - mean**2, 0.0) * trials / max(trials - 1, 1)
    return {
        "mse": float(np.mean(errors)),
        "standard_error": float(np.std(errors, ddof=1) / math.sqrt(trials)),
        "mean_estimate": mean,
        "mean_standard_error": np.sqrt(variance / trials),
    }
