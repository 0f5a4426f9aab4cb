"""
Adaptive reconstruction of graph signals from streaming samples.

At every time step `n`, each vertex `i` is observed independently with
probability `p_i`, giving `y[n] = D[n] (x + v[n])`. The LMS recursion

    x_hat[n+1] = x_hat[n] + mu B_F D[n] (y[n] - x_hat[n])

keeps the estimate bandlimited and converges in the mean-square sense when
the expected sampling set determines the bandlimited signals and
`0 < mu < 2 lambda_min / lambda_max^2` of `U_F^T diag(p) U_F`. Small step-size
predictions of the steady-state error and of the convergence rate drive the
design of sampling probabilities of minimal total rate.
"""

from __future__ import annotations

import math
import sys
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from graphsampling._linalg.dense import smallest_eigenpair
from graphsampling.config import default_solver_config
from graphsampling.errors import InfeasibleDesignError, RecoveryConditionError
from graphsampling.recovery import recovery_condition
from graphsampling.seeding import spawn_generators

if TYPE_CHECKING:
    import numpy.typing as npt

    from graphsampling.noise import NoiseModel
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import (
        AdaptiveDesignSpec,
        LearningCurve,
        LmsState,
        LmsTheory,
        Matrix,
        ProbabilityDesign,
        RecoveryCondition,
        SolverConfiguration,
        Vector,
        VertexSet,
    )

STEADY_STATE_FRACTION = 0.2
RESTORATION_STEPS = 60
RESTORATION_PERIOD = 10
STAGNATION_WINDOW = 1000
DRAW_CHUNK = 1000


class ProbabilisticSampler:
    """
    Independent Bernoulli sampling of every vertex with probability `p_i`,
    capped by `p_max_i`.

    The `seed` determines the random streams of the observation process.
    """

    __slots__ = ("_probabilities", "_p_max", "_seed")

    def __init__(
        self,
        p: Sequence[float] | Vector,
        p_max: Sequence[float] | Vector | None = None,
        seed: int = 0,
    ) -> None:
        probabilities = np.array(p, dtype=np.float64)
        if p_max is None:
            caps = np.ones_like(probabilities)
        else:
            caps = np.array(p_max, dtype=np.float64)
        if probabilities.ndim != 1 or caps.shape != probabilities.shape:
            raise ValueError("Probabilities and caps must be vectors of equal length.")
        if np.any(caps > 1.0) or np.any(probabilities < 0.0):
            raise ValueError("Probabilities must lie in [0, 1].")
        if np.any(probabilities > caps):
            raise ValueError("Probabilities cannot exceed their caps.")
        probabilities.setflags(write=False)
        caps.setflags(write=False)
        self._probabilities = probabilities
        self._p_max = caps
        self._seed = seed

    @staticmethod
    def uniform(n: int, probability: float, seed: int = 0) -> ProbabilisticSampler:
        return ProbabilisticSampler(np.full(n, probability), seed=seed)

    @property
    def p(self) -> Vector:
        return self._probabilities

    @property
    def p_max(self) -> Vector:
        return self._p_max

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def n(self) -> int:
        return len(self._probabilities)

    def expected_set(self) -> VertexSet:
        """The vertices sampled with nonzero probability."""
        return tuple(int(v) for v in np.flatnonzero(self._probabilities > 0))

    def __repr__(self) -> str:
        rate = float(np.sum(self._probabilities))
        return f"ProbabilisticSampler(n={self.n}, rate={rate:.6g})"


class ObservationProcess:
    """
    The random sampling masks and noise of a sampler, for `replicas`
    independent runs.

    Each vertex owns one stream for its Bernoulli masks and one for its
    noise, spawned from the sampler seed. Consecutive calls to :meth:`draw`
    continue the streams, so the drawn sequence does not depend on how a run
    is split into chunks.
    """

    def __init__(
        self, sampler: ProbabilisticSampler, noise: NoiseModel, replicas: int = 1
    ) -> None:
        if noise.n != sampler.n:
            raise ValueError(f"Noise for {noise.n} vertices, sampler for {sampler.n}.")
        if replicas < 1:
            raise ValueError("At least one replica is required.")
        root = np.random.SeedSequence(sampler.seed)
        mask_seed, noise_seed = root.spawn(2)
        self.sampler = sampler
        self.noise = noise
        self.replicas = replicas
        self._mask_streams = spawn_generators(mask_seed, sampler.n)
        self._noise_streams = spawn_generators(noise_seed, sampler.n)
        self._deviations = np.sqrt(noise.variances)

    def draw(self, steps: int) -> tuple[npt.NDArray[np.bool_], Matrix]:
        """
        Masks and noise for the next `steps` time steps, both of shape
        `(steps, replicas, n)`.
        """
        n = self.sampler.n
        masks = np.empty((steps, self.replicas, n), dtype=bool)
        noise = np.empty((steps, self.replicas, n))
        shape = (steps, self.replicas)
        for i in range(n):
            masks[:, :, i] = self._mask_streams[i].random(shape) < self.sampler.p[i]
            noise[:, :, i] = (
                self._noise_streams[i].standard_normal(shape) * self._deviations[i]
            )
        return masks, noise


def observe(x: Vector, process: ObservationProcess) -> tuple[Matrix, Matrix]:
    """
    One time step of noisy random sampling, `y = D (x + v)`.

    Returns
    -------
    tuple[Matrix, Matrix]
        The observations and the 0/1 sampling masks, of shape `(n,)` for a
        single replica and `(replicas, n)` otherwise.
    """
    masks, noise = process.draw(1)
    mask = masks[0].astype(np.float64)
    y = mask * (np.asarray(x, dtype=np.float64) + noise[0])
    if process.replicas == 1:
        return y[0], mask[0]
    return y, mask


def initial_state(basis: SpectralBasis, mu: float, x0: Vector | None = None) -> LmsState:
    """
    The LMS state at time zero; the initial estimate is projected onto the
    bandlimited subspace.
    """
    if mu <= 0.0:
        raise ValueError(f"The step size must be positive, got {mu}.")
    estimate = np.zeros(basis.n) if x0 is None else np.asarray(x0, dtype=np.float64)
    estimate = (estimate @ basis.U_F) @ basis.U_F.T
    return {"estimate": estimate, "mu": mu, "iteration": 0, "squared_errors": []}


def lms_step(state: LmsState, basis: SpectralBasis, y: Vector, mask: Vector) -> LmsState:
    """
    One LMS update `x_hat + mu B_F D (y - x_hat)`.

    Works on a single estimate or on a stack of replicas (one per row).
    """
    estimate = state["estimate"]
    innovation = mask * (y - estimate)
    update = (innovation @ basis.U_F) @ basis.U_F.T
    return {
        "estimate": estimate + state["mu"] * update,
        "mu": state["mu"],
        "iteration": state["iteration"] + 1,
        "squared_errors": state["squared_errors"],
    }


def record_error(state: LmsState, x: Vector) -> LmsState:
    """
    Append the squared error of the current estimate (averaged over replicas).
    """
    error = (state["estimate"] - x) ** 2
    value = float(np.sum(error) / (1 if error.ndim == 1 else error.shape[0]))
    return {**state, "squared_errors": state["squared_errors"] + [value]}


def expected_information(basis: SpectralBasis, p: Vector) -> Matrix:
    """`U_F^T diag(p) U_F`."""
    return basis.U_F.T @ (basis.U_F * np.asarray(p, dtype=np.float64)[:, None])


def adaptive_recovery_condition(
    basis: SpectralBasis, sampler: ProbabilisticSampler
) -> RecoveryCondition:
    """
    The recovery condition of the expected sampling set.
    """
    return recovery_condition(basis, sampler.expected_set())


def _extreme_eigenvalues(basis: SpectralBasis, p: Vector) -> tuple[float, float]:
    values = np.linalg.eigvalsh(expected_information(basis, p))
    return float(values[0]), float(values[-1])


def stable_step_range(basis: SpectralBasis, p: Vector) -> tuple[float, float]:
    """
    The open interval `(0, 2 lambda_min / lambda_max^2)` of mean-square stable
    step sizes, with eigenvalues of `U_F^T diag(p) U_F`.

    Raises
    ------
    RecoveryConditionError
        If the expected sampling set does not determine the bandlimited signals.
    """
    support = tuple(int(v) for v in np.flatnonzero(np.asarray(p) > 0))
    condition = recovery_condition(basis, support)
    if not condition["ok"]:
        raise RecoveryConditionError(
            "The expected sampling set does not determine the bandlimited signals",
            condition["norm"],
        )
    smallest, largest = _extreme_eigenvalues(basis, p)
    return 0.0, 2.0 * smallest / (largest * largest)


def lms_mse_theory(
    basis: SpectralBasis, p: Vector, noise: NoiseModel, mu: float
) -> LmsTheory:
    """
    Small step-size steady-state mean square error
    `(mu / 2) Tr[(U_F^T diag(p) U_F)^-1 U_F^T diag(p) R_v U_F]` and decay factor
    `alpha = 1 - 2 mu lambda_min(U_F^T diag(p) U_F)` of the LMS recursion.

    Raises
    ------
    ValueError
        If `mu` lies outside the stable range.
    """
    low, high = stable_step_range(basis, p)
    if not low < mu < high:
        raise ValueError(f"Step size {mu} is outside the stable range ({low}, {high}).")
    p = np.asarray(p, dtype=np.float64)
    information = expected_information(basis, p)
    weighted = expected_information(basis, p * noise.variances)
    mse = 0.5 * mu * float(np.trace(np.linalg.solve(information, weighted)))
    smallest = float(np.linalg.eigvalsh(information)[0])
    return {"mse": mse, "alpha": 1.0 - 2.0 * mu * smallest}


def mse_bound(basis: SpectralBasis, p: Vector, noise: NoiseModel, mu: float) -> float:
    """
    The upper bound `(mu / 2) Tr(U_F^T diag(p) R_v U_F) / lambda_min(U_F^T diag(p) U_F)`
    of the steady-state mean square error; it is a ratio of a linear and a
    concave function of `p`.
    """
    p = np.asarray(p, dtype=np.float64)
    smallest, _ = _extreme_eigenvalues(basis, p)
    if smallest <= 0.0:
        return math.inf
    trace = float(np.sum(p * noise.variances * np.sum(basis.U_F**2, axis=1)))
    return 0.5 * mu * trace / smallest


def probability_design_report(
    spec: AdaptiveDesignSpec, basis: SpectralBasis, p: Vector
) -> ProbabilityDesign:
    """
    Evaluate a probability vector against the requirements of `spec`.
    """
    p = np.asarray(p, dtype=np.float64)
    smallest, _ = _extreme_eigenvalues(basis, p)
    bound = mse_bound(basis, p, spec["noise"], spec["mu"])
    try:
        mse = lms_mse_theory(basis, p, spec["noise"], spec["mu"])["mse"]
    except (ValueError, RecoveryConditionError):
        mse = math.inf
    return {
        "probabilities": p,
        "total_rate": float(np.sum(p)),
        "rate_slack": smallest - (1.0 - spec["alpha_bar"]) / (2.0 * spec["mu"]),
        "mse_slack": spec["gamma"] - bound,
        "mse_bound": bound,
        "mse": mse,
    }


class _DesignConstraints:
    """
    The two convex constraints `g(p) <= 0` of the probability design problem:
    `a - lambda_min(P(p))` and `(mu / (2 gamma)) c^T p - lambda_min(P(p))`
    with `P(p) = U_F^T diag(p) U_F` and `c_i = r_i^2 ||u_i||^2`.
    """

    def __init__(self, spec: AdaptiveDesignSpec, basis: SpectralBasis) -> None:
        self.basis = basis
        self.rate_target = (1.0 - spec["alpha_bar"]) / (2.0 * spec["mu"])
        self.cost = (spec["mu"] / (2.0 * spec["gamma"])) * (
            spec["noise"].variances * np.sum(basis.U_F**2, axis=1)
        )

    def evaluate(self, p: Vector) -> tuple[float, float, Vector]:
        smallest, vector = smallest_eigenpair(expected_information(self.basis, p))
        direction = (self.basis.U_F @ vector) ** 2
        rate = self.rate_target - smallest
        mse = float(self.cost @ p) - smallest
        return rate, mse, direction

    def feasible(self, p: Vector) -> bool:
        rate, mse, _ = self.evaluate(p)
        return rate <= 0.0 and mse <= 0.0


def _restore(constraints: _DesignConstraints, p: Vector, p_max: Vector) -> Vector:
    """
    The feasible point closest to `p` on the segment from `p` to `p_max`.
    """
    low, high = 0.0, 1.0
    for _ in range(RESTORATION_STEPS):
        middle = 0.5 * (low + high)
        if constraints.feasible(p + middle * (p_max - p)):
            high = middle
        else:
            low = middle
    return p + high * (p_max - p)


def design_probabilities(
    spec: AdaptiveDesignSpec,
    basis: SpectralBasis,
    seed: int = 0,
    config: SolverConfiguration | None = None,
) -> ProbabilisticSampler:
    """
    Find sampling probabilities of minimal total rate `sum(p)` such that

    - `lambda_min(U_F^T diag(p) U_F) >= (1 - alpha_bar) / (2 mu)` (convergence
      at least as fast as `alpha_bar`),
    - `(mu / 2) Tr(U_F^T diag(p) R_v U_F) <= gamma lambda_min(U_F^T diag(p) U_F)`
      (the mean square error bound is at most `gamma`),
    - `0 <= p <= p_max`.

    Both constraints are convex because `lambda_min` of an affine matrix
    function is concave. The problem is solved by projected subgradient
    descent: violated iterates take a Polyak step on the most violated
    constraint, feasible ones decrease every probability by `s / sqrt(k)`.
    Infeasible iterates are periodically moved back towards `p_max` by
    bisection, and the best feasible point is returned.

    Parameters
    ----------
    spec : AdaptiveDesignSpec
        The requirements.
    basis : SpectralBasis
        The basis and its frequency set.
    seed : int
        The seed of the returned sampler.
    config : SolverConfiguration | None
        Solver options (`design_max_iterations`, `design_step`, `debug`).

    Returns
    -------
    ProbabilisticSampler
        The optimized sampler; its probabilities satisfy every constraint.

    Raises
    ------
    InfeasibleDesignError
        If the constraints cannot hold even at `p = p_max`. The error names the
        violated requirement.
    """
    if config is None:
        config = default_solver_config()
    if not 0.0 < spec["alpha_bar"] < 1.0:
        raise ValueError(f"alpha_bar must lie in (0, 1), got {spec['alpha_bar']}.")
    if spec["gamma"] <= 0.0 or spec["mu"] <= 0.0:
        raise ValueError("gamma and mu must be positive.")

    p_max = np.asarray(spec["p_max"], dtype=np.float64)
    if p_max.shape != (basis.n,) or np.any(p_max < 0.0) or np.any(p_max > 1.0):
        raise ValueError("p_max must be a vector of caps in [0, 1].")

    constraints = _DesignConstraints(spec, basis)
    rate, mse, _ = constraints.evaluate(p_max)
    if rate > 0.0:
        raise InfeasibleDesignError(
            "alpha_bar",
            f"The convergence-rate constraint (alpha_bar = {spec['alpha_bar']}) "
            f"cannot be met: lambda_min at p_max falls short by {rate:.3e}.",
        )
    if mse > 0.0:
        raise InfeasibleDesignError(
            "gamma",
            f"The mean square error constraint (gamma = {spec['gamma']}) "
            f"cannot be met: the bound at p_max exceeds it.",
        )

    best = p_max.copy()
    best_rate = float(np.sum(best))
    last_improvement = 0
    step_scale = config["design_step"] * float(np.max(p_max))
    p = p_max.copy()
    iterations = config["design_max_iterations"]

    def consider(candidate: Vector) -> None:
        nonlocal best, best_rate, last_improvement
        total = float(np.sum(candidate))
        if total < best_rate - 1e-12 and constraints.feasible(candidate):
            best, best_rate, last_improvement = candidate.copy(), total, k

    k = 0
    for k in range(1, iterations + 1):
        rate, mse, direction = constraints.evaluate(p)
        violation = max(rate, mse)
        if violation > 0.0:
            subgradient = -direction if rate >= mse else constraints.cost - direction
            norm_sq = float(subgradient @ subgradient)
            if norm_sq > 0.0:
                p = np.clip(p - (violation / norm_sq) * subgradient, 0.0, p_max)
            if k % RESTORATION_PERIOD == 0:
                consider(_restore(constraints, p, p_max))
        else:
            consider(p)
            p = np.clip(p - step_scale / math.sqrt(k), 0.0, p_max)

        if config["debug"] and k % 1000 == 0:
            print(
                f"[design-p] Iteration {k}: best total rate {best_rate:.8g}.",
                file=sys.stderr,
            )
        if k - last_improvement > STAGNATION_WINDOW:
            break

    consider(_restore(constraints, p, p_max))
    assert constraints.feasible(best), "The designed probabilities are infeasible."

    report = probability_design_report(spec, basis, best)
    assert report["mse"] <= report["mse_bound"] * (1.0 + 1e-9) or math.isinf(report["mse"])

    if config["debug"]:
        print(
            f"[design-p] Finished after {k} iterations with total rate {best_rate:.8g}.",
            file=sys.stderr,
        )
    return ProbabilisticSampler(best, p_max, seed=seed)


def piecewise_signal(segments: Sequence[tuple[int, Vector]], steps: int) -> Matrix:
    """
    A piecewise-constant signal schedule of shape `(steps + 1, n)`.

    Each segment `(start, x)` makes `x` the true signal from time `start`
    on; the first segment must start at time zero.
    """
    if len(segments) == 0 or segments[0][0] != 0:
        raise ValueError("The first segment must start at time zero.")
    n = len(segments[0][1])
    schedule = np.empty((steps + 1, n))
    starts = [start for start, _ in segments] + [steps + 1]
    for (start, x), stop in zip(segments, starts[1:]):
        schedule[start:stop] = np.asarray(x, dtype=np.float64)
    return schedule


def signal_schedule(
    x_true: Vector | Matrix | Callable[[int], Vector], steps: int
) -> Callable[[int], Vector]:
    """
    The true signal as a function of the time step `0 .. steps`.
    """
    if callable(x_true):
        return x_true
    array = np.asarray(x_true, dtype=np.float64)
    if array.ndim == 1:
        return lambda _: array
    if array.shape[0] < steps + 1:
        raise ValueError(f"A schedule needs {steps + 1} rows, got {array.shape[0]}.")
    return lambda t: array[t]


def lms_run(
    basis: SpectralBasis,
    x_true: Vector | Matrix | Callable[[int], Vector],
    sampler: ProbabilisticSampler,
    noise: NoiseModel,
    mu: float,
    steps: int,
    replicas: int = 1,
    x0: Vector | None = None,
    config: SolverConfiguration | None = None,
) -> LearningCurve:
    """
    Run the LMS recursion for `steps` iterations on `replicas` independent
    observation processes at once.

    `x_true` is a fixed signal, a schedule with one row per time step (see
    :func:`piecewise_signal`) or a function of the time step. The squared
    error `||x_hat[n] - x[n]||^2` is averaged over the replicas for every
    `n = 0 .. steps`.
    """
    if config is None:
        config = default_solver_config()
    signal_at = signal_schedule(x_true, steps)
    process = ObservationProcess(sampler, noise, replicas)

    state = initial_state(basis, mu, x0)
    state = {**state, "estimate": np.tile(state["estimate"], (replicas, 1))}
    errors = np.empty(steps + 1)
    errors[0] = float(np.mean(np.sum((state["estimate"] - signal_at(0)) ** 2, axis=1)))

    done = 0
    while done < steps:
        size = min(DRAW_CHUNK, steps - done)
        masks, noise_draws = process.draw(size)
        for t in range(size):
            time = done + t
            mask = masks[t].astype(np.float64)
            y = mask * (signal_at(time) + noise_draws[t])
            state = lms_step(state, basis, y, mask)
            errors[time + 1] = float(
                np.mean(np.sum((state["estimate"] - signal_at(time + 1)) ** 2, axis=1))
            )
        done += size
        if config["debug"]:
            print(
                f"[lms] Iteration {done}: mean squared error {errors[done]:.6e}.",
                file=sys.stderr,
            )

    return {
        "squared_errors": errors,
        "estimate": state["estimate"],
        "mu": mu,
        "replicas": replicas,
    }


def steady_state_mse(errors: Vector, fraction: float = STEADY_STATE_FRACTION) -> float:
    """
    The time average of a squared error series over its final `fraction`.
    """
    errors = np.asarray(errors, dtype=np.float64)
    count = max(1, int(round(fraction * len(errors))))
    return float(np.mean(errors[-count:]))


def decay_factor(errors: Vector, start: int, stop: int) -> float:
    """
    The geometric mean per-step ratio `(e[stop] / e[start])^(1 / (stop - start))`.
    """
    if stop <= start:
        raise ValueError("The decay window must be nonempty.")
    return float((errors[stop] / errors[start]) ** (1.0 / (stop - start)))
