"""
Some basic utility operations on vertex sets.

Each vertex set is a sorted tuple of distinct 0-based vertex indices. See also
:data:`VertexSet<graphsampling.types.VertexSet>`.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

import numpy as np

if TYPE_CHECKING:
    from graphsampling.types import Matrix, Vector, VertexSet


def make_vertex_set(vertices: Iterable[int], n: int) -> VertexSet:
    """
    Normalize a collection of vertices into a :data:`VertexSet`.

    Parameters
    ----------
    vertices : Iterable[int]
        The vertices, in any order. Duplicates are removed.
    n : int
        The number of vertices of the graph.

    Returns
    -------
    VertexSet
        The sorted vertex set.

    Example
    -------
    >>> make_vertex_set([3, 1, 3], 5)
    (1, 3)
    """
    result = sorted({int(v) for v in vertices})
    for v in result:
        if v < 0 or v >= n:
            raise ValueError(f"Vertex {v} is out of range for {n} vertices.")
    return tuple(result)


def complement(vertices: VertexSet, n: int) -> VertexSet:
    """
    The vertices of the graph that are not in `vertices`.
    """
    members = set(vertices)
    return tuple(v for v in range(n) if v not in members)


def indicator(vertices: VertexSet, n: int) -> Vector:
    """The indicator vector `1_S`."""
    result = np.zeros(n)
    result[list(vertices)] = 1.0
    return result


def vertex_limiting(vertices: VertexSet, n: int) -> Matrix:
    """The vertex-limiting projector `D_S = diag(1_S)`."""
    return np.diag(indicator(vertices, n))


def selection_matrix(vertices: VertexSet, n: int) -> Matrix:
    """
    The `n x |S|` sampling matrix `P_S` whose columns are the indicator
    vectors of the members of `S`. It satisfies `D_S = P_S P_S^T`.
    """
    result = np.zeros((n, len(vertices)))
    for column, v in enumerate(vertices):
        result[v, column] = 1.0
    return result
