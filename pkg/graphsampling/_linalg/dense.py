"""
Thresholded singular value helpers.

All helpers treat singular values (or eigenvalues of positive semidefinite
matrices) below `threshold` times the largest one as zero.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from graphsampling.types import Matrix, Vector


def singular_values(matrix: Matrix) -> Vector:
    """Singular values in descending order; empty matrices have none."""
    if matrix.size == 0:
        return np.zeros(0)
    return np.linalg.svd(matrix, compute_uv=False)


def spectral_norm(matrix: Matrix) -> float:
    values = singular_values(matrix)
    return float(values[0]) if len(values) > 0 else 0.0


def smallest_singular_value(matrix: Matrix) -> float:
    """
    The smallest of the `min(rows, columns)` singular values of a tall matrix,
    or zero when the matrix has fewer rows than columns.
    """
    rows, columns = matrix.shape
    if rows < columns or columns == 0:
        return 0.0
    return float(singular_values(matrix)[-1])


def numerical_rank(matrix: Matrix, threshold: float = 1e-10) -> int:
    values = singular_values(matrix)
    if len(values) == 0 or values[0] <= 0.0:
        return 0
    return int(np.sum(values > threshold * values[0]))


def pseudo_inverse(matrix: Matrix, threshold: float = 1e-10) -> Matrix:
    return np.linalg.pinv(matrix, rcond=threshold)


def nonzero_eigenvalues(gram: Matrix, threshold: float = 1e-10) -> Vector:
    """
    The eigenvalues of a symmetric positive semidefinite matrix that exceed
    `threshold` times the largest eigenvalue.
    """
    if gram.size == 0:
        return np.zeros(0)
    values = np.linalg.eigvalsh(gram)
    largest = float(values[-1])
    if largest <= 0.0:
        return np.zeros(0)
    return values[values > threshold * largest]


def pseudo_log_det(gram: Matrix, threshold: float = 1e-10) -> float:
    """
    Logarithm of the pseudo-determinant; zero (empty product) for a zero matrix.
    """
    return float(np.sum(np.log(nonzero_eigenvalues(gram, threshold))))


def pseudo_inverse_trace(gram: Matrix, threshold: float = 1e-10) -> float:
    return float(np.sum(1.0 / nonzero_eigenvalues(gram, threshold)))


def smallest_eigenpair(symmetric: Matrix) -> tuple[float, Vector]:
    values, vectors = np.linalg.eigh(symmetric)
    return float(values[0]), vectors[:, 0]


def safe_sqrt(value: float) -> float:
    return math.sqrt(max(value, 0.0))
