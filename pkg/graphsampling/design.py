"""
Optimal sampling set design.

A sampling set `S` of size `M` is chosen to optimize a scalar summary of the
information matrix `G(S) = U_F^T D_S R_v^{-1} U_F`:

- A-optimal design maximizes `-Tr(G^-1)`, i.e. minimizes the mean square
  error of the best linear unbiased estimator;
- E-optimal design maximizes `sigma_min(D_S U_F)`, i.e. the cosine of the
  largest angle between the bandlimited and the vertex-limited subspace;
- D-optimal design maximizes `log det G`, the volume of the confidence
  ellipsoid.

For sets that do not (yet) determine the bandlimited signals, the inverse and
determinant are replaced by the pseudo-inverse and pseudo-determinant. Set
functions are maximized; the convex relaxation over `d in [0, 1]^n` is
minimized and uses the negated forms.

Three selection strategies are provided: exhaustive search, greedy
selection and convex relaxation followed by rounding. Greedy and exhaustive
search order candidates first by the rank of `G` and then by the objective,
so a candidate that determines more in-band directions always wins.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from graphsampling._design_algorithms.exhaustive import exhaustive_select as _exhaustive
from graphsampling._design_algorithms.greedy import greedy_select as _greedy
from graphsampling._design_algorithms.relaxed import relaxed_select as _relaxed
from graphsampling._linalg.dense import (
    numerical_rank,
    pseudo_inverse_trace,
    pseudo_log_det,
    safe_sqrt,
    smallest_eigenpair,
    smallest_singular_value,
)
from graphsampling.seeding import SeedLike, make_generator

if TYPE_CHECKING:
    from graphsampling.noise import NoiseModel
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import (
        CriterionKind,
        Matrix,
        RelaxedDesign,
        SolverConfiguration,
        Vector,
        VertexSet,
    )


class DesignCriterion:
    """
    An A-, E- or D-optimal design criterion under a given noise model.

    The noise variances must be strictly positive. The E criterion does not
    depend on the noise.
    """

    __slots__ = ("_kind", "_noise")

    def __init__(self, kind: CriterionKind, noise: NoiseModel) -> None:
        if kind not in ("A", "E", "D"):
            raise ValueError(f"Unknown design criterion `{kind}`.")
        if not noise.is_positive():
            raise ValueError("Design criteria need strictly positive noise variances.")
        self._kind: CriterionKind = kind
        self._noise = noise

    @staticmethod
    def unit(kind: CriterionKind, n: int) -> DesignCriterion:
        """A criterion with unit noise variance on every vertex."""
        from graphsampling.noise import NoiseModel

        return DesignCriterion(kind, NoiseModel.homoscedastic(n, 1.0))

    @property
    def kind(self) -> CriterionKind:
        return self._kind

    @property
    def noise(self) -> NoiseModel:
        return self._noise

    def __repr__(self) -> str:
        return f"DesignCriterion({self._kind!r})"

    def information_matrix(self, basis: SpectralBasis, weights: Vector) -> Matrix:
        """
        `U_F^T diag(weights / r^2) U_F` for a (relaxed) sampling indicator.
        """
        scaled = weights / self._noise.variances
        return basis.U_F.T @ (basis.U_F * scaled[:, None])

    def objective(
        self, basis: SpectralBasis, vertices: VertexSet, threshold: float = 1e-10
    ) -> float:
        """
        See :func:`objective` for documentation.
        """
        if len(vertices) == 0:
            return 0.0
        if self._kind == "E":
            return smallest_singular_value(basis.U_F[list(vertices), :])
        weights = np.zeros(basis.n)
        weights[list(vertices)] = 1.0
        gram = self.information_matrix(basis, weights)
        if self._kind == "A":
            return -pseudo_inverse_trace(gram, threshold)
        return pseudo_log_det(gram, threshold)

    def rank(
        self, basis: SpectralBasis, vertices: VertexSet, threshold: float = 1e-10
    ) -> int:
        """
        The rank of the information matrix of `vertices`.
        """
        return numerical_rank(basis.U_F[list(vertices), :], threshold)

    def relaxed_objective(self, basis: SpectralBasis, weights: Vector) -> float:
        """
        See :func:`relaxed_objective` for documentation.
        """
        if self._kind == "E":
            gram = basis.U_F.T @ (basis.U_F * weights[:, None])
            smallest, _ = smallest_eigenpair(gram)
            return -safe_sqrt(smallest)

        values = np.linalg.eigvalsh(self.information_matrix(basis, weights))
        if values[0] <= 0.0:
            return math.inf
        if self._kind == "A":
            return float(np.sum(1.0 / values))
        return float(-np.sum(np.log(values)))

    def relaxed_gradient(self, basis: SpectralBasis, weights: Vector) -> Vector:
        """
        See :func:`relaxed_gradient` for documentation.
        """
        if self._kind == "E":
            gram = basis.U_F.T @ (basis.U_F * weights[:, None])
            smallest, vector = smallest_eigenpair(gram)
            root = safe_sqrt(smallest)
            projections = (basis.U_F @ vector) ** 2
            if root == 0.0:
                return -projections
            return -projections / (2.0 * root)

        values, vectors = np.linalg.eigh(self.information_matrix(basis, weights))
        if values[0] <= 0.0:
            raise ValueError("The relaxed information matrix is singular.")
        rotated = (basis.U_F @ vectors) ** 2
        power = 2.0 if self._kind == "A" else 1.0
        return -(rotated @ (1.0 / values**power)) / self._noise.variances


def objective(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    vertices: VertexSet,
    threshold: float = 1e-10,
) -> float:
    """
    The design objective `f(S)` (to be maximized).

    - A: `-Tr(G^+)` with `G = U_F^T D_S R_v^-1 U_F`;
    - E: `sigma_min(D_S U_F)` (zero while `|S| < |F|`);
    - D: `log pdet(G)`, the sum of the logarithms of the eigenvalues of `G`
      exceeding `threshold` times the largest one.

    The empty set has objective zero under every criterion.

    Parameters
    ----------
    criterion : DesignCriterion
        The criterion.
    basis : SpectralBasis
        The basis and its frequency set.
    vertices : VertexSet
        The sampling set.
    threshold : float
        Relative threshold of the pseudo-inverse and pseudo-determinant.

    Returns
    -------
    float
        The objective value.

    Example
    -------
    >>> from graphsampling.graph_utils import generate_graph, shift_operator
    >>> from graphsampling.spectral import spectral_decompose
    >>> basis = spectral_decompose(shift_operator(generate_graph("path(3)")), frequencies=[0])
    >>> round(objective(DesignCriterion.unit("A", 3), basis, (1,)), 10)
    -3.0
    """
    return criterion.objective(basis, vertices, threshold)


def relaxed_objective(
    criterion: DesignCriterion, basis: SpectralBasis, weights: Vector
) -> float:
    """
    The relaxed design objective `f(d)` (to be minimized).

    - A: `Tr(G(d)^-1)`;
    - E: `-sqrt(lambda_min(U_F^T diag(d) U_F))`, which equals
      `-sigma_min(D_S U_F)` when `d` is the indicator of `S`;
    - D: `-log det G(d)`;

    where `G(d) = U_F^T diag(d) R_v^-1 U_F`. The A and D forms are `+inf` when
    `G(d)` is singular.
    """
    return criterion.relaxed_objective(basis, weights)


def relaxed_gradient(
    criterion: DesignCriterion, basis: SpectralBasis, weights: Vector
) -> Vector:
    """
    The gradient of :func:`relaxed_objective` with respect to `d`.

    With `u_i` the `i`-th row of `U_F`:

    - A: `-u_i^T G^-2 u_i / r_i^2`;
    - D: `-u_i^T G^-1 u_i / r_i^2`;
    - E: `-(u_i^T v)^2 / (2 sqrt(lambda_min))` with `v` the eigenvector of the
      smallest eigenvalue; a subgradient when that eigenvalue is repeated.
    """
    return criterion.relaxed_gradient(basis, weights)


def information_rank(
    basis: SpectralBasis, vertices: VertexSet, threshold: float = 1e-10
) -> int:
    """
    The number of in-band directions determined by the samples on `vertices`.
    """
    return numerical_rank(basis.U_F[list(vertices), :], threshold)


def exhaustive_select(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    samples: int,
    config: SolverConfiguration | None = None,
) -> VertexSet:
    """
    Find the optimal sampling set of size `samples` by enumerating all
    candidates.

    Candidates are compared by the rank of their information matrix and then
    by :func:`objective`. Objective values within a relative tolerance of
    `1e-10` are ties, which are resolved towards the lexicographically
    smallest set.

    Raises
    ------
    ValueError
        If the number of candidates exceeds `config["exhaustive_limit"]`.

    Example
    -------
    >>> from graphsampling.graph_utils import generate_graph, shift_operator
    >>> from graphsampling.spectral import spectral_decompose
    >>> basis = spectral_decompose(shift_operator(generate_graph("path(3)")), frequencies=[0])
    >>> exhaustive_select(DesignCriterion.unit("A", 3), basis, 1)
    (0,)
    """
    return _exhaustive(criterion, basis, samples, config)


def greedy_select(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    samples: int,
    config: SolverConfiguration | None = None,
) -> VertexSet:
    """
    Build a sampling set of size `samples` greedily.

    Starting from the empty set, the vertex whose addition yields the best
    (rank, objective) pair is added until the set has `samples` vertices.
    Ties are resolved towards the lowest vertex index. For the D criterion,
    whose objective is monotone and submodular once `G` is invertible, the
    result is within a factor `1 - 1/e` of the optimum.
    """
    return _greedy(criterion, basis, samples, config)


def relaxed_select(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    samples: int,
    config: SolverConfiguration | None = None,
) -> tuple[RelaxedDesign, VertexSet]:
    """
    Design a sampling set by convex relaxation.

    Minimizes :func:`relaxed_objective` over `{d in [0, 1]^n : sum(d) = samples}`
    starting from the uniform point `(samples / n) 1`. A and D use projected
    gradient descent with Armijo backtracking; E is nonsmooth and uses
    normalized projected subgradient steps `a / sqrt(k)`, keeping the best
    iterate. The design is rounded to the `samples` largest entries of `d`
    (ties towards the lowest index).

    Returns
    -------
    tuple[RelaxedDesign, VertexSet]
        The relaxed solution with its solver trace, and the rounded set.
    """
    return _relaxed(criterion, basis, samples, config)


def random_select(n: int, samples: int, seed: SeedLike = None) -> VertexSet:
    """
    A uniformly random sampling set of size `samples`.
    """
    if samples > n:
        raise ValueError(f"Cannot select {samples} of {n} vertices.")
    chosen = make_generator(seed).choice(n, size=samples, replace=False)
    return tuple(sorted(int(v) for v in chosen))
