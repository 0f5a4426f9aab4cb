"""
Spectral analysis of graph signals.

The eigenvectors of a symmetric shift operator form an orthonormal basis
`U` of the signal space. The graph Fourier transform of a signal `x` is
`s = U^T x`, and a signal is bandlimited to a frequency set `F` when its
transform vanishes outside `F`, i.e. `x = U_F s_F`.
"""

from __future__ import annotations

import sys
from typing import TYPE_CHECKING, Iterable

import numpy as np

from graphsampling._linalg.dense import singular_values
from graphsampling._linalg.jacobi import jacobi_eigh
from graphsampling.config import default_solver_config
from graphsampling.errors import ConvergenceError
from graphsampling.seeding import SeedLike, make_generator

if TYPE_CHECKING:
    from graphsampling.graph_utils import ShiftOperator
    from graphsampling.types import (
        LocalizationResult,
        Matrix,
        SolverConfiguration,
        Vector,
        VertexSet,
    )

ORTHONORMALITY_TOLERANCE = 1e-10
RESIDUAL_TOLERANCE = 1e-8
SIGN_THRESHOLD = 1e-12
LOCALIZATION_TOLERANCE = 1e-9


class SpectralBasis:
    """
    An orthonormal eigenbasis of a shift operator together with a frequency
    set `F`.

    The basis is immutable: all arrays are read-only, and a basis with a
    different frequency set is obtained through :meth:`with_frequencies`.
    Frequencies are 0-based column indices of `U`, whose columns are sorted
    by ascending eigenvalue.
    """

    __slots__ = ("_vectors", "_eigenvalues", "_frequencies", "_in_band")

    def __init__(
        self, vectors: Matrix, eigenvalues: Vector, frequencies: Iterable[int]
    ) -> None:
        vectors = np.array(vectors, dtype=np.float64, copy=True)
        eigenvalues = np.array(eigenvalues, dtype=np.float64, copy=True)
        n = vectors.shape[0]
        if vectors.shape != (n, n) or eigenvalues.shape != (n,):
            raise ValueError(
                f"Inconsistent basis shapes {vectors.shape} and {eigenvalues.shape}."
            )
        if np.any(np.diff(eigenvalues) < 0):
            raise ValueError("Eigenvalues must be sorted in ascending order.")

        frequency_list = sorted({int(f) for f in frequencies})
        if len(frequency_list) == 0:
            raise ValueError("The frequency set cannot be empty.")
        if frequency_list[0] < 0 or frequency_list[-1] >= n:
            raise ValueError(f"Frequencies {frequency_list} are out of range for {n}.")

        in_band = vectors[:, frequency_list]
        for array in (vectors, eigenvalues, in_band):
            array.setflags(write=False)

        self._vectors = vectors
        self._eigenvalues = eigenvalues
        self._frequencies: tuple[int, ...] = tuple(frequency_list)
        self._in_band = in_band

    @property
    def U(self) -> Matrix:
        """The eigenvector matrix (one eigenvector per column)."""
        return self._vectors

    @property
    def eigenvalues(self) -> Vector:
        return self._eigenvalues

    @property
    def frequencies(self) -> tuple[int, ...]:
        return self._frequencies

    @property
    def U_F(self) -> Matrix:
        """The `n x |F|` matrix of in-band eigenvectors."""
        return self._in_band

    @property
    def n(self) -> int:
        return self._vectors.shape[0]

    @property
    def bandwidth(self) -> int:
        return len(self._frequencies)

    def with_frequencies(self, frequencies: Iterable[int]) -> SpectralBasis:
        """
        The same eigenbasis with another frequency set.
        """
        return SpectralBasis(self._vectors, self._eigenvalues, frequencies)

    def __repr__(self) -> str:
        return f"SpectralBasis(n={self.n}, frequencies={list(self._frequencies)})"


def normalize_eigenvectors(vectors: Matrix) -> Matrix:
    """
    Make the first entry of every column whose magnitude exceeds `1e-12`
    positive.
    """
    result = np.array(vectors, copy=True)
    for column in range(result.shape[1]):
        significant = np.flatnonzero(np.abs(result[:, column]) > SIGN_THRESHOLD)
        if len(significant) > 0 and result[significant[0], column] < 0:
            result[:, column] = -result[:, column]
    return result


def spectral_decompose(
    op: ShiftOperator,
    tol: float | None = None,
    frequencies: Iterable[int] | None = None,
    config: SolverConfiguration | None = None,
) -> SpectralBasis:
    """
    Compute the eigenbasis of a symmetric shift operator.

    Eigenvalues are sorted in ascending order (ties keep the solver order)
    and every eigenvector is normalized so that its first significant entry
    is positive, which makes the basis deterministic. The result is checked
    for orthonormality and for the eigen-residual `||S u - lambda u||`.

    Parameters
    ----------
    op : ShiftOperator
        The shift operator.
    tol : float | None
        Relative off-diagonal tolerance of the Jacobi solver. Defaults to
        `config["jacobi_tolerance"]`.
    frequencies : Iterable[int] | None
        The 0-based frequency set of the returned basis. Defaults to all
        frequencies.
    config : SolverConfiguration | None
        Solver options; `config["eigensolver"]` selects Jacobi or LAPACK.

    Returns
    -------
    SpectralBasis
        The eigenbasis.

    Raises
    ------
    ConvergenceError
        If the eigensolver fails to converge or the result does not satisfy
        the orthonormality and residual checks.

    Example
    -------
    >>> from graphsampling.graph_utils import generate_graph, shift_operator
    >>> basis = spectral_decompose(shift_operator(generate_graph("path(3)")))
    >>> [round(float(v), 10) for v in basis.eigenvalues]
    [0.0, 1.0, 3.0]
    """
    if config is None:
        config = default_solver_config()
    if tol is None:
        tol = config["jacobi_tolerance"]

    matrix = op.matrix
    if config["eigensolver"] == "lapack":
        eigenvalues, vectors = np.linalg.eigh(matrix)
    else:
        eigenvalues, vectors = jacobi_eigh(
            matrix, tol, config["jacobi_max_sweeps"], config["debug"]
        )

    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = normalize_eigenvectors(vectors[:, order])

    n = op.n
    orthogonality = float(np.linalg.norm(vectors.T @ vectors - np.eye(n)))
    if orthogonality > ORTHONORMALITY_TOLERANCE:
        raise ConvergenceError("Eigenvectors are not orthonormal", orthogonality)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    residuals = np.linalg.norm(matrix @ vectors - vectors * eigenvalues, axis=0)
    worst = float(np.max(residuals))
    if worst > RESIDUAL_TOLERANCE * scale:
        raise ConvergenceError("Eigen-residual exceeds its tolerance", worst)

    if config["debug"]:
        print(
            f"[spectral] Decomposed {op.kind} of order {n}; max residual {worst:.3e}.",
            file=sys.stderr,
        )

    if frequencies is None:
        frequencies = range(n)
    return SpectralBasis(vectors, eigenvalues, frequencies)


def _check_signal(basis: SpectralBasis, x: Vector) -> Vector:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (basis.n,):
        raise ValueError(f"Expected a signal of length {basis.n}, got shape {x.shape}.")
    return x


def gft(basis: SpectralBasis, x: Vector) -> Vector:
    """
    The graph Fourier transform `s = U^T x`.
    """
    return basis.U.T @ _check_signal(basis, x)


def inverse_gft(basis: SpectralBasis, s: Vector) -> Vector:
    """
    The inverse graph Fourier transform `x = U s`.
    """
    return basis.U @ _check_signal(basis, s)


def band_project(basis: SpectralBasis, x: Vector) -> Vector:
    """
    Apply the band-limiting projector `B_F = U_F U_F^T`.
    """
    x = _check_signal(basis, x)
    return basis.U_F @ (basis.U_F.T @ x)


def band_limiting(basis: SpectralBasis) -> Matrix:
    """The band-limiting projector `B_F` as a matrix."""
    return basis.U_F @ basis.U_F.T


def split_bandlimited(basis: SpectralBasis, x: Vector) -> tuple[Vector, Vector]:
    """
    Split a signal into its bandlimited part `B_F x` and the out-of-band
    remainder.
    """
    in_band = band_project(basis, x)
    return in_band, np.asarray(x, dtype=np.float64) - in_band


def localization_test(basis: SpectralBasis, vertices: VertexSet) -> LocalizationResult:
    """
    Test whether some bandlimited signal is perfectly localized on a vertex set.

    A signal is perfectly localized on `S` and `F` when it is a fixed point of
    both `D_S` and `B_F`; such a signal exists exactly when `||D_S U_F|| = 1`.
    The witness is then the top right singular vector of `D_S U_F` mapped
    back to the vertex domain, which is the unit-eigenvalue eigenvector of
    `B_F D_S B_F`.

    Parameters
    ----------
    basis : SpectralBasis
        The basis and its frequency set.
    vertices : VertexSet
        The vertex set.

    Returns
    -------
    LocalizationResult
        The norm `||D_S U_F||`, the localization flag and the witness.
    """
    rows = basis.U_F[list(vertices), :]
    if rows.shape[0] == 0:
        return {"norm": 0.0, "localized": False, "witness": None}

    _, values, right = np.linalg.svd(rows, full_matrices=False)
    norm = float(values[0])
    localized = abs(norm - 1.0) <= LOCALIZATION_TOLERANCE
    witness: Vector | None = None
    if localized:
        candidate = basis.U_F @ right[0]
        witness = normalize_eigenvectors(candidate[:, None])[:, 0]
    return {"norm": norm, "localized": localized, "witness": witness}


def concentration(basis: SpectralBasis, vertices: VertexSet) -> float:
    """
    The largest eigenvalue of `U_F^T D_S U_F`, i.e. the largest fraction of
    energy that a bandlimited signal can concentrate on `vertices`.
    """
    values = singular_values(basis.U_F[list(vertices), :])
    return float(values[0] ** 2) if len(values) > 0 else 0.0


def synthesize_bandlimited(
    basis: SpectralBasis, coeffs: Vector | None = None, seed: SeedLike = None
) -> Vector:
    """
    The bandlimited signal `U_F s_F`.

    When `coeffs` is omitted, the in-band coefficients are drawn from a
    standard normal distribution using `seed`.
    """
    if coeffs is None:
        coeffs = make_generator(seed).standard_normal(basis.bandwidth)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape != (basis.bandwidth,):
        raise ValueError(
            f"Expected {basis.bandwidth} coefficients, got shape {coeffs.shape}."
        )
    return basis.U_F @ coeffs


def perturb_bandlimited(
    basis: SpectralBasis, x: Vector, level: float, seed: SeedLike = None
) -> Vector:
    """
    Add a random out-of-band component of norm `level * ||x||` to `x`.

    The result is approximately bandlimited, the setting in which the
    worst-case reconstruction error is governed by the out-of-band energy.
    """
    x = _check_signal(basis, x)
    noise = make_generator(seed).standard_normal(basis.n)
    out_of_band = noise - band_project(basis, noise)
    norm = float(np.linalg.norm(out_of_band))
    if norm == 0.0:
        return x.copy()
    return x + out_of_band * (level * float(np.linalg.norm(x)) / norm)
