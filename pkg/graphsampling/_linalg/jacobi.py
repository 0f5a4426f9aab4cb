from __future__ import annotations

import math
import sys
from typing import TYPE_CHECKING

import numpy as np

from graphsampling.errors import ConvergenceError

if TYPE_CHECKING:
    from graphsampling.types import Matrix, Vector


def off_diagonal_norm(matrix: Matrix) -> float:
    """
    The Frobenius norm of the off-diagonal part of a square matrix.
    """
    return float(np.linalg.norm(matrix - np.diag(np.diag(matrix))))


def jacobi_eigh(
    matrix: Matrix,
    tolerance: float = 1e-12,
    max_sweeps: int = 100,
    debug: bool = False,
) -> tuple[Vector, Matrix]:
    """
    Diagonalize a real symmetric matrix using cyclic Jacobi rotations.

    Every sweep visits the strictly upper triangular entries in row-major
    order and annihilates each of them with one plane rotation. The iteration
    stops once the off-diagonal Frobenius norm is at most `tolerance` times
    the Frobenius norm of the input.

    The eigenvalues are returned in the order in which they appear on the
    final diagonal; callers are responsible for sorting and normalization.

    Parameters
    ----------
    matrix : Matrix
        A real symmetric `n x n` matrix. It is not modified.
    tolerance : float
        The relative off-diagonal tolerance.
    max_sweeps : int
        Number of sweeps after which the solver gives up.
    debug : bool
        Print the off-diagonal norm after every sweep.

    Returns
    -------
    tuple[Vector, Matrix]
        The eigenvalues and the matrix whose columns are the corresponding
        orthonormal eigenvectors.

    Raises
    ------
    ConvergenceError
        If the tolerance is not reached within `max_sweeps` sweeps.

    Example
    -------
    >>> values, vectors = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    >>> sorted(round(float(v), 12) for v in values)
    [1.0, 3.0]
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    n = a.shape[0]
    assert a.shape == (n, n), f"Expected a square matrix, got {a.shape}."

    vectors = np.eye(n)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), vectors

    threshold = tolerance * scale
    residual = off_diagonal_norm(a)
    for sweep in range(max_sweeps):
        if residual <= threshold:
            return np.diag(a).copy(), vectors

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q

                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q

        residual = off_diagonal_norm(a)
        if debug:
            print(
                f"[jacobi] Sweep {sweep + 1}: off-diagonal norm {residual:.3e}.",
                file=sys.stderr,
            )

    if residual <= threshold:
        return np.diag(a).copy(), vectors

    raise ConvergenceError(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps", residual
    )
