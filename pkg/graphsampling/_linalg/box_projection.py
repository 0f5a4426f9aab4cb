from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from graphsampling.types import Vector


def project_capped_simplex(
    y: Vector, total: float, max_iterations: int = 200, tolerance: float = 1e-13
) -> Vector:
    """
    Euclidean projection onto `{d : 0 <= d <= 1, sum(d) = total}`.

    The projection has the form `clip(y - tau, 0, 1)` where the water level
    `tau` makes the entries sum to `total`. The sum is non-increasing in `tau`,
    so `tau` is found by bisection.

    Parameters
    ----------
    y : Vector
        The point to project.
    total : float
        The required sum, between `0` and `len(y)`.

    Returns
    -------
    Vector
        The projected point.

    Example
    -------
    >>> project_capped_simplex(np.array([0.9, 0.8, 0.1]), 1.0)
    array([0.55, 0.45, 0.  ])
    """
    n = len(y)
    if total < 0.0 or total > n:
        raise ValueError(
            f"Cannot project onto a capped simplex of size {total} in {n} dimensions."
        )
    if total == n:
        return np.ones(n)
    if total == 0.0:
        return np.zeros(n)

    low = float(np.min(y)) - 1.0
    high = float(np.max(y))
    tau = 0.5 * (low + high)
    for _ in range(max_iterations):
        tau = 0.5 * (low + high)
        mass = float(np.sum(np.clip(y - tau, 0.0, 1.0)))
        if abs(mass - total) <= tolerance * max(1.0, total):
            break
        if mass > total:
            low = tau
        else:
            high = tau

    return np.clip(y - tau, 0.0, 1.0)
