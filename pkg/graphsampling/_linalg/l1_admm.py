from __future__ import annotations

import math
import sys
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from graphsampling.types import Matrix, Vector


def soft_threshold(v: Vector, kappa: float) -> Vector:
    """
    The proximal operator of `kappa * ||.||_1`.
    """
    return np.maximum(0.0, v - kappa) - np.maximum(0.0, -v - kappa)


def least_absolute_deviations(
    a: Matrix,
    b: Vector,
    rho: float = 1.0,
    relaxation: float = 1.6,
    tolerance: float = 1e-7,
    max_iterations: int = 20_000,
    debug: bool = False,
) -> tuple[Vector, bool, int]:
    """
    Minimize `||a x - b||_1` using ADMM on the split `z = a x - b`.

    The x-update is a least squares solve with `a` (precomputed through the
    pseudo-inverse), the z-update is soft thresholding, and the residual and
    dual stopping criteria use the same absolute and relative `tolerance`.

    Parameters
    ----------
    a : Matrix
        An `m x k` matrix with full column rank.
    b : Vector
        The observations.
    rho : float
        The augmented Lagrangian penalty.
    relaxation : float
        The over-relaxation parameter (between 1 and 2).
    tolerance : float
        Absolute and relative tolerance of the primal and dual residuals.
    max_iterations : int
        The iteration cap.
    debug : bool
        Print the residuals every thousand iterations.

    Returns
    -------
    tuple[Vector, bool, int]
        The minimizer, `True` if the stopping criteria were met, and the
        number of iterations.
    """
    m, k = a.shape
    solve = np.linalg.pinv(a)
    x = np.zeros(k)
    z = np.zeros(m)
    u = np.zeros(m)
    b_norm = float(np.linalg.norm(b))

    for iteration in range(1, max_iterations + 1):
        x = solve @ (b + z - u)
        z_old = z
        ax = a @ x
        ax_hat = relaxation * ax + (1.0 - relaxation) * (z_old + b)
        z = soft_threshold(ax_hat - b + u, 1.0 / rho)
        u = u + (ax_hat - z - b)

        r_norm = float(np.linalg.norm(ax - z - b))
        s_norm = float(np.linalg.norm(rho * (a.T @ (z - z_old))))
        eps_primal = math.sqrt(m) * tolerance + tolerance * max(
            float(np.linalg.norm(ax)), float(np.linalg.norm(z)), b_norm
        )
        eps_dual = math.sqrt(k) * tolerance + tolerance * float(
            np.linalg.norm(rho * (a.T @ u))
        )

        if debug and iteration % 1000 == 0:
            print(
                f"[admm] Iteration {iteration}: primal {r_norm:.3e}, dual {s_norm:.3e}.",
                file=sys.stderr,
            )

        if r_norm < eps_primal and s_norm < eps_dual:
            return x, True, iteration

    return x, False, max_iterations
