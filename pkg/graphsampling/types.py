from __future__ import annotations

from typing import TYPE_CHECKING, Literal, TypeAlias, TypedDict

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from graphsampling.noise import NoiseModel

Vector: TypeAlias = npt.NDArray[np.float64]
"""Type alias for a one-dimensional `float64` array. Used for graph signals, frequency coefficients and per-vertex weights."""
Matrix: TypeAlias = npt.NDArray[np.float64]
"""Type alias for a two-dimensional `float64` array."""
VertexSet: TypeAlias = tuple[int, ...]
"""Type alias for `tuple[int, ...]`. Represents a sorted duplicate-free set of 0-based vertex indices (see :mod:`graphsampling.vertex_utils`)."""
ShiftKind: TypeAlias = Literal["adjacency", "laplacian"]
"""Type alias for the supported graph shift operators."""
CriterionKind: TypeAlias = Literal["A", "E", "D"]
"""Type alias for the optimal design criteria."""
SelectionMethod: TypeAlias = Literal["exhaustive", "greedy", "relaxed", "random"]
"""Type alias for the sampling set selection strategies."""
EigenSolver: TypeAlias = Literal["jacobi", "lapack"]
"""Type alias for the available symmetric eigensolvers."""


class SolverConfiguration(TypedDict):
    """
    Describes the numerical options shared by the algorithms of `graphsampling`.

    Use :func:`graphsampling.config.default_solver_config` to create a
    configuration dictionary pre-populated with default values.
    """

    debug: bool
    """
    If `True`, long running operations print messages describing their
    progress to standard error.

    [Default: False]
    """

    eigensolver: EigenSolver
    """
    The eigensolver used by :func:`graphsampling.spectral.spectral_decompose`.
    Cyclic Jacobi is bit-reproducible; `lapack` is much faster on large graphs.

    [Default: "jacobi"]
    """

    jacobi_tolerance: float
    """
    The Jacobi iteration stops once the Frobenius norm of the off-diagonal part
    drops below `jacobi_tolerance` times the Frobenius norm of the matrix.

    [Default: 1e-12]
    """

    jacobi_max_sweeps: int
    """
    Number of cyclic sweeps after which the Jacobi solver gives up with a
    `ConvergenceError`.

    [Default: 100]
    """

    rank_threshold: float
    """
    Relative threshold under which singular values (or eigenvalues of Gram
    matrices) are treated as zero. Used by ranks, pseudo-inverses and
    pseudo-determinants.

    [Default: 1e-10]
    """

    exhaustive_limit: int
    """
    Maximal number of candidate sets examined by exhaustive search. Larger
    problems fail with a `ValueError` instead of running for hours.

    [Default: 2_000_000]
    """

    relaxation_max_iterations: int
    """
    Iteration cap of the projected (sub)gradient solver of the relaxed
    sampling design.

    [Default: 5000]
    """

    relaxation_tolerance: float
    """
    The relaxed design solver stops once two consecutive iterates differ by
    less than this value (Euclidean norm).

    [Default: 1e-8]
    """

    armijo_beta: float
    """
    Backtracking factor of the Armijo line search.

    [Default: 0.5]
    """

    armijo_c: float
    """
    Sufficient decrease constant of the Armijo line search.

    [Default: 1e-4]
    """

    subgradient_step: float
    """
    The E-optimal relaxation uses normalized subgradient steps of length
    `subgradient_step / sqrt(k)` in iteration `k`.

    [Default: 0.5]
    """

    admm_rho: float
    """
    Penalty parameter of the ADMM solver used for l1 reconstruction.

    [Default: 1.0]
    """

    admm_relaxation: float
    """
    Over-relaxation parameter of the ADMM solver.

    [Default: 1.6]
    """

    admm_tolerance: float
    """
    Absolute and relative primal/dual residual tolerance of ADMM.

    [Default: 1e-7]
    """

    admm_max_iterations: int
    """
    Iteration cap of the ADMM solver. Results that hit the cap are returned
    with `converged=False`.

    [Default: 20_000]
    """

    design_max_iterations: int
    """
    Iteration cap of the projected subgradient solver that designs sampling
    probabilities.

    [Default: 10_000]
    """

    design_step: float
    """
    Initial length of the rate-decreasing step of the probability design
    solver, relative to the largest probability cap. Steps decay as `1/sqrt(k)`.

    [Default: 0.05]
    """


class LocalizationResult(TypedDict):
    """
    Result of :func:`graphsampling.spectral.localization_test`.
    """

    norm: float
    """
    The spectral norm of `D_S U_F`.
    """

    localized: bool
    """
    `True` if some bandlimited signal is perfectly localized on the vertex set.
    """

    witness: Vector | None
    """
    A unit-norm bandlimited signal supported on the vertex set, if one exists.
    """


class RecoveryCondition(TypedDict):
    """
    Result of :func:`graphsampling.recovery.recovery_condition`.
    """

    ok: bool
    """
    `True` if every bandlimited signal is uniquely determined by its samples.
    """

    norm: float
    """
    The spectral norm of `D_Sc U_F` (zero when every vertex is sampled).
    """

    rank_ok: bool
    """
    `True` if the sampled rows of `U_F` have full column rank.
    """


class RelaxedDesign(TypedDict):
    """
    Result of the convex relaxation of the sampling design problem
    (see :func:`graphsampling.design.relaxed_select`).
    """

    weights: Vector
    """
    The relaxed sampling indicator `d`, with entries in `[0, 1]` summing to
    `samples`.
    """

    samples: int
    """
    The number of samples `M`.
    """

    iterations: int
    """
    The number of solver iterations that were performed.
    """

    relaxed_objective: float
    """
    The relaxed (minimization form) objective at `weights`.
    """

    objective: float
    """
    The set objective of the rounded sampling set.
    """

    converged: bool
    """
    `False` if the solver stopped at its iteration cap.
    """


class ObservationBatch(TypedDict):
    """
    Samples of a graph signal observed on a vertex set.
    """

    samples: VertexSet
    """
    The observed vertices.
    """

    values: Vector
    """
    The observations, one per vertex of `samples`.
    """

    noise: NoiseModel | None
    """
    The noise model of the observations, if known.
    """


class RecoveryReport(TypedDict):
    """
    Result of a batch reconstruction (see :mod:`graphsampling.recovery`).
    """

    signal: Vector
    """
    The reconstructed graph signal `U_F s`.
    """

    coefficients: Vector
    """
    The reconstructed in-band frequency coefficients `s`.
    """

    condition: float
    """
    The smallest singular value of `D_S U_F`, i.e. the cosine of the largest
    angle between the bandlimited and the vertex-limited subspace.
    """

    theoretical_mse: float | None
    """
    The predicted mean square error of the estimator, when it is known.
    """

    method: str
    """
    The reconstruction method (`consistent`, `blue` or `l1`).
    """

    converged: bool
    """
    `False` if an iterative solver stopped at its iteration cap.
    """


class MismatchBound(TypedDict):
    """
    Result of :func:`graphsampling.recovery.mismatch_bound`.
    """

    bound: float
    """
    The worst-case reconstruction error `||dx|| / cos_theta`.
    """

    cos_theta: float
    """
    The smallest singular value of `D_S U_F`.
    """

    delta_norm: float
    """
    The norm of the out-of-band part of the signal.
    """

    observed_error: float
    """
    The error of the consistent reconstruction from the noiseless samples.
    """


class MonteCarloSummary(TypedDict):
    """
    Empirical statistics of an estimator over noisy trials.
    """

    mse: float
    """
    The average squared error over all trials.
    """

    standard_error: float
    """
    The standard error of `mse`.
    """

    mean_estimate: Vector
    """
    The average estimate over all trials.
    """

    mean_standard_error: Vector
    """
    The per-vertex standard error of `mean_estimate`.
    """


class LmsState(TypedDict):
    """
    State of the LMS reconstruction of a graph signal
    (see :func:`graphsampling.adaptive.lms_step`).
    """

    estimate: Vector
    """
    The current bandlimited estimate (one row per replica when simulating
    several runs at once).
    """

    mu: float
    """
    The step size.
    """

    iteration: int
    """
    The number of updates that were applied.
    """

    squared_errors: list[float]
    """
    Squared errors recorded by :func:`graphsampling.adaptive.record_error`.
    """


class LmsTheory(TypedDict):
    """
    Small step-size predictions of the steady-state behaviour of LMS.
    """

    mse: float
    """
    The steady-state mean square error.
    """

    alpha: float
    """
    The per-iteration decay factor of the mean square deviation.
    """


class AdaptiveDesignSpec(TypedDict):
    """
    The requirements of an optimal probabilistic sampling design
    (see :func:`graphsampling.adaptive.design_probabilities`).
    """

    alpha_bar: float
    """
    Target convergence factor in `(0, 1)`. Smaller is faster.
    """

    gamma: float
    """
    Target steady-state mean square error.
    """

    mu: float
    """
    The LMS step size.
    """

    noise: NoiseModel
    """
    The observation noise.
    """

    p_max: Vector
    """
    Per-vertex upper bounds on the sampling probabilities.
    """


class ProbabilityDesign(TypedDict):
    """
    Constraint diagnostics of a sampling probability vector with respect to
    an :class:`AdaptiveDesignSpec`.
    """

    probabilities: Vector
    """
    The examined probability vector.
    """

    total_rate: float
    """
    The expected number of samples per iteration, `sum(p)`.
    """

    rate_slack: float
    """
    `lambda_min - (1 - alpha_bar) / (2 mu)`; nonnegative when the
    convergence-rate requirement holds.
    """

    mse_slack: float
    """
    `gamma - mse_bound`; nonnegative when the mean square error requirement
    holds.
    """

    mse_bound: float
    """
    The convex-ratio upper bound of the steady-state mean square error.
    """

    mse: float
    """
    The small step-size steady-state mean square error.
    """


class LearningCurve(TypedDict):
    """
    Result of :func:`graphsampling.adaptive.lms_run`.
    """

    squared_errors: Vector
    """
    `||x_hat[n] - x[n]||^2` averaged over replicas, for `n = 0 .. T`.
    """

    estimate: Matrix
    """
    The final estimates, one row per replica.
    """

    mu: float
    """
    The step size of the run.
    """

    replicas: int
    """
    The number of independent runs that were averaged.
    """


class DiffusionState(TypedDict):
    """
    State of a diffusion LMS network (see :func:`graphsampling.diffusion.diffusion_step`).

    Arrays carry a leading replica axis, followed by the node axis and the
    coefficient axis.
    """

    coefficients: npt.NDArray[np.float64]
    """
    The local frequency coefficient estimates `s_i`.
    """

    intermediate: npt.NDArray[np.float64]
    """
    The adapted estimates `psi_i` of the latest step.
    """

    iteration: int
    """
    The number of completed rounds.
    """


class DiffusionCurves(TypedDict):
    """
    Result of :func:`graphsampling.diffusion.diffusion_run`.
    """

    node_nmse: Matrix
    """
    Per-node normalized squared error, one row per iteration `0 .. T`.
    The row mean equals the network NMSE.
    """

    network_nmse: Vector
    """
    The normalized squared error of the whole network estimate.
    """

    steady_state: float
    """
    The network NMSE averaged over the final 20% of the run.
    """

    messages_per_round: list[int]
    """
    The number of vectors exchanged in each round.
    """

    total_messages: int
    """
    The number of vectors exchanged during the run.
    """


class ResultTable(TypedDict):
    """
    A named table of results produced by :func:`graphsampling.experiments.run_experiment`.
    """

    name: str
    """
    The table name; used to derive the file name of the table.
    """

    header: list[str]
    """
    The column names.
    """

    rows: list[list[int | float | str]]
    """
    The table rows.
    """

    comments: list[str]
    """
    Extra comment lines written after the provenance line.
    """


class ExperimentConfig(TypedDict):
    """
    Describes the options of a command line experiment.

    Use :func:`graphsampling.config.default_experiment_config` to create a
    configuration dictionary pre-populated with default values, and
    :func:`graphsampling.config.load_config` to read one from a file.
    """

    command: str
    """
    The experiment to run (`decompose`, `select`, `recover`, `mse-curve`,
    `l1-sweep`, `lms-run`, `design-p`, `diffuse-run` or `gen-graph`).
    """

    graph: str
    """
    The processing graph: `file:<path>` for an edge list, or a generator
    such as `erdos_renyi(40, 0.2)`.

    [Default: "erdos_renyi(40, 0.2)"]
    """

    comm_graph: str
    """
    The communication graph of `diffuse-run`. An empty value reuses the
    processing graph.

    [Default: ""]
    """

    shift: ShiftKind
    """
    The graph shift operator.

    [Default: "laplacian"]
    """

    frequencies: str
    """
    The frequency set: `lowest(k)` or a 1-based list such as `1,2,5`.

    [Default: "lowest(8)"]
    """

    criterion: CriterionKind
    """
    The optimal design criterion of `select` and `recover`.

    [Default: "E"]
    """

    method: SelectionMethod
    """
    The sampling set selection strategy.

    [Default: "greedy"]
    """

    samples: list[int]
    """
    Sampling set sizes, written as `8..20`, `8,10,12` or `8`.

    [Default: [8]]
    """

    bandwidths: list[int]
    """
    Bandwidths of the `mse-curve` bandwidth sweep and of `l1-sweep`.

    [Default: [2, 4, 6, 8, 10]]
    """

    corruption: list[int]
    """
    Numbers of corrupted vertices of `l1-sweep` (the first one is used by
    `recover` with `reconstruction = l1`).

    [Default: 0..20]
    """

    magnitude: float
    """
    Amplitude of the sparse corruption of `l1-sweep`.

    [Default: 5.0]
    """

    sweep: Literal["samples", "bandwidth"]
    """
    The swept quantity of `mse-curve`.

    [Default: "samples"]
    """

    reconstruction: Literal["consistent", "blue", "l1"]
    """
    The estimator used by `recover`.

    [Default: "blue"]
    """

    signal: str
    """
    A `vertex,value` CSV file with the signal of `recover`. When empty, a
    random bandlimited signal is synthesized.

    [Default: ""]
    """

    noise: float
    """
    Homoscedastic noise variance.

    [Default: 0.01]
    """

    noise_file: str
    """
    A `vertex,variance` CSV file overriding `noise`.

    [Default: ""]
    """

    mismatch: float
    """
    Relative norm of the out-of-band component of approximately bandlimited
    signals.

    [Default: 0.05]
    """

    seed: int
    """
    The master random seed.

    [Default: 0]
    """

    trials: int
    """
    Number of random draws per sweep point.

    [Default: 200]
    """

    mu: float
    """
    The LMS step size (centralized; diffusion uses the matched step `n * mu`).

    [Default: 0.01]
    """

    probability: float
    """
    Uniform sampling probability of `lms-run` and `diffuse-run`.

    [Default: 0.5]
    """

    alpha_bar: float
    """
    Target convergence factor of `design-p`.

    [Default: 0.99]
    """

    gamma: float
    """
    Target mean square error of `design-p`.

    [Default: 0.001]
    """

    p_max: float
    """
    Uniform cap on sampling probabilities of `design-p`.

    [Default: 1.0]
    """

    iterations: int
    """
    Number of adaptive iterations `T`.

    [Default: 2000]
    """

    replicas: int
    """
    Number of independent replicas averaged by adaptive runs.

    [Default: 10]
    """

    workers: int
    """
    Number of threads evaluating the points of a sweep. Results do not depend
    on it.

    [Default: 4]
    """

    weights: Literal["metropolis", "laplacian", "uniform", "identity"]
    """
    Combination weights of `diffuse-run`.

    [Default: "metropolis"]
    """

    eigensolver: EigenSolver
    """
    See :attr:`SolverConfiguration.eigensolver`.

    [Default: "jacobi"]
    """

    output: str
    """
    Output file stem. Empty writes every table to standard output.

    [Default: ""]
    """

    svg: str
    """
    Optional SVG plot path.

    [Default: ""]
    """

    debug: bool
    """
    Print progress messages to standard error.

    [Default: False]
    """
