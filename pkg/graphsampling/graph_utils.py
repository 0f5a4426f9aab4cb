"""
Graphs, graph shift operators and synthetic graph generators.

Graphs are undirected `networkx.Graph` objects whose nodes are the integers
`0 .. n-1` and whose edges carry a positive `weight` attribute.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

import networkx as nx  # type: ignore
import numpy as np

from graphsampling.config import parse_call
from graphsampling.errors import ConfigError

if TYPE_CHECKING:
    from graphsampling.types import Matrix, ShiftKind

GENERATOR_ATTEMPTS = 100
"""
Random generators are re-sampled this many times before giving up on
producing a connected graph.
"""


def make_graph(n: int, edges: Iterable[tuple[int, int, float]]) -> nx.Graph:
    """
    Build an undirected weighted graph on the vertices `0 .. n-1`.

    Parameters
    ----------
    n : int
        The number of vertices.
    edges : Iterable[tuple[int, int, float]]
        Edges `(i, j, weight)` with 0-based endpoints. An edge may be listed
        in both directions as long as the weights agree.

    Returns
    -------
    nx.Graph
        The graph.

    Raises
    ------
    ValueError
        On self-loops, out-of-range endpoints, non-positive weights or
        conflicting duplicate edges.

    Example
    -------
    >>> g = make_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    >>> sorted(g.edges(data="weight"))
    [(0, 1, 1.0), (1, 2, 1.0)]
    """
    if n < 1:
        raise ValueError(f"A graph needs at least one vertex, got {n}.")
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for i, j, weight in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"Edge ({i}, {j}) is out of range for {n} vertices.")
        if i == j:
            raise ValueError(f"Self-loop on vertex {i} is not allowed.")
        if not weight > 0.0:
            raise ValueError(f"Edge ({i}, {j}) has non-positive weight {weight}.")
        if graph.has_edge(i, j):
            if graph.edges[i, j]["weight"] != weight:
                raise ValueError(f"Edge ({i}, {j}) is listed with different weights.")
            continue
        graph.add_edge(i, j, weight=float(weight))
    return graph


def weighted_edges(graph: nx.Graph) -> list[tuple[int, int, float]]:
    """
    The edges of a graph as sorted `(i, j, weight)` triples with `i < j`.
    """
    result: list[tuple[int, int, float]] = []
    for i, j, weight in graph.edges(data="weight", default=1.0):
        a, b = (i, j) if i < j else (j, i)
        result.append((int(a), int(b), float(weight)))
    return sorted(result)


def is_connected(graph: nx.Graph) -> bool:
    return graph.number_of_nodes() > 0 and bool(nx.is_connected(graph))


def connected_components(graph: nx.Graph) -> list[list[int]]:
    """
    The connected components as sorted vertex lists, ordered by their
    smallest vertex.
    """
    components = [sorted(c) for c in nx.connected_components(graph)]
    return sorted(components, key=lambda c: c[0])


class ShiftOperator:
    """
    A graph shift operator: the weighted adjacency matrix `A` or the
    combinatorial Laplacian `L = diag(A 1) - A` of an undirected graph.

    The matrix is read-only. It is exactly symmetric because it is assembled
    from undirected edges.
    """

    __slots__ = ("_kind", "_matrix")

    def __init__(self, kind: ShiftKind, matrix: Matrix) -> None:
        if kind not in ("adjacency", "laplacian"):
            raise ValueError(f"Unknown shift operator `{kind}`.")
        matrix = np.array(matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"A shift operator must be square, got {matrix.shape}.")
        if not np.array_equal(matrix, matrix.T):
            raise ValueError("Only symmetric shift operators are supported.")
        matrix.setflags(write=False)
        self._kind: ShiftKind = kind
        self._matrix = matrix

    @property
    def kind(self) -> ShiftKind:
        return self._kind

    @property
    def matrix(self) -> Matrix:
        return self._matrix

    @property
    def n(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f"ShiftOperator(kind={self._kind!r}, n={self.n})"


def adjacency_matrix(graph: nx.Graph) -> Matrix:
    n = graph.number_of_nodes()
    return nx.to_numpy_array(graph, nodelist=range(n), weight="weight", dtype=np.float64)


def shift_operator(graph: nx.Graph, kind: ShiftKind = "laplacian") -> ShiftOperator:
    """
    Build the shift operator of a graph.

    Example
    -------
    >>> shift_operator(make_graph(2, [(0, 1, 1.0)])).matrix
    array([[ 1., -1.],
           [-1.,  1.]])
    """
    adjacency = adjacency_matrix(graph)
    if kind == "adjacency":
        return ShiftOperator("adjacency", adjacency)
    if kind == "laplacian":
        laplacian = np.diag(adjacency.sum(axis=1)) - adjacency
        return ShiftOperator("laplacian", laplacian)
    raise ValueError(f"Unknown shift operator `{kind}`.")


def _relabel(graph: nx.Graph) -> nx.Graph:
    n = graph.number_of_nodes()
    index = {node: i for i, node in enumerate(sorted(graph.nodes()))}
    return make_graph(n, [(index[a], index[b], 1.0) for a, b in graph.edges()])


def _random_model(name: str, arguments: list[str], seed: int) -> nx.Graph:
    if name in ("erdos_renyi", "er"):
        if len(arguments) != 2:
            raise ConfigError("graph", f"`{name}` expects (n, probability)")
        return nx.gnp_random_graph(int(arguments[0]), float(arguments[1]), seed=seed)
    if name == "two_block":
        if len(arguments) != 4:
            raise ConfigError("graph", "`two_block` expects (n1, n2, p_in, p_out)")
        n1, n2 = int(arguments[0]), int(arguments[1])
        p_in, p_out = float(arguments[2]), float(arguments[3])
        return nx.stochastic_block_model(
            [n1, n2], [[p_in, p_out], [p_out, p_in]], seed=seed
        )
    raise ConfigError("graph", f"unknown graph generator `{name}`")


def generate_graph(spec: str, seed: int = 0) -> nx.Graph:
    """
    Create a synthetic graph from a generator specification.

    Deterministic generators are `path(n)`, `cycle(n)` and `complete(n)`.
    Random generators are `erdos_renyi(n, p)` (also `er(n, p)`) and
    `two_block(n1, n2, p_in, p_out)`, a two-community stochastic block model.
    Random generators are re-sampled with seeds derived from `seed` until the
    graph is connected.

    Parameters
    ----------
    spec : str
        The generator specification.
    seed : int
        The random seed.

    Returns
    -------
    nx.Graph
        A connected graph with unit weights.

    Raises
    ------
    ConfigError
        If the specification is invalid or no connected graph was found in
        :data:`GENERATOR_ATTEMPTS` attempts.

    Example
    -------
    >>> sorted(generate_graph("path(3)").edges())
    [(0, 1), (1, 2)]
    """
    try:
        name, arguments = parse_call(spec)
    except ValueError as e:
        raise ConfigError("graph", str(e)) from None

    try:
        if name == "path":
            return _relabel(nx.path_graph(int(arguments[0])))
        if name == "cycle":
            return _relabel(nx.cycle_graph(int(arguments[0])))
        if name == "complete":
            return _relabel(nx.complete_graph(int(arguments[0])))

        rng = np.random.default_rng(seed)
        for _ in range(GENERATOR_ATTEMPTS):
            attempt_seed = int(rng.integers(2**32))
            graph = _relabel(_random_model(name, arguments, attempt_seed))
            if is_connected(graph):
                return graph
    except (IndexError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError("graph", f"invalid generator `{spec}`: {e}") from None

    raise ConfigError(
        "graph", f"`{spec}` produced no connected graph in {GENERATOR_ATTEMPTS} attempts"
    )
