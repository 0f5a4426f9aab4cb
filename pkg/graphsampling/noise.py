from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

import numpy as np

if TYPE_CHECKING:
    from graphsampling.types import Matrix, Vector, VertexSet


class NoiseModel:
    """
    Spatially uncorrelated zero-mean Gaussian noise with per-vertex
    variances `r_i^2` (a diagonal covariance `R_v`).

    Variances must be nonnegative; criteria and estimators that divide by
    them check positivity on the vertices they use.
    """

    __slots__ = ("_variances",)

    def __init__(self, variances: Iterable[float] | Vector) -> None:
        if not isinstance(variances, np.ndarray):
            variances = list(variances)
        values = np.array(variances, dtype=np.float64)
        if values.ndim != 1 or len(values) == 0:
            raise ValueError("Noise variances must form a nonempty vector.")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("Noise variances must be finite and nonnegative.")
        values.setflags(write=False)
        self._variances = values

    @staticmethod
    def homoscedastic(n: int, variance: float) -> NoiseModel:
        """Equal variance on every vertex."""
        return NoiseModel(np.full(n, float(variance)))

    @staticmethod
    def noiseless(n: int) -> NoiseModel:
        return NoiseModel(np.zeros(n))

    @property
    def variances(self) -> Vector:
        return self._variances

    @property
    def n(self) -> int:
        return len(self._variances)

    def covariance(self) -> Matrix:
        """The covariance matrix `R_v`."""
        return np.diag(self._variances)

    def restrict(self, vertices: VertexSet) -> Vector:
        """The variances of the given vertices."""
        return self._variances[list(vertices)]

    def is_positive(self, vertices: VertexSet | None = None) -> bool:
        values = self._variances if vertices is None else self.restrict(vertices)
        return bool(np.all(values > 0))

    def sample(self, generator: np.random.Generator, shape: tuple[int, ...] = ()) -> Matrix:
        """
        Draw noise of shape `shape + (n,)`.
        """
        draws = generator.standard_normal(shape + (self.n,))
        return draws * np.sqrt(self._variances)

    def __repr__(self) -> str:
        return f"NoiseModel(n={self.n})"
