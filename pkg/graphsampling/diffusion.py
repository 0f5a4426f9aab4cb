"""
Distributed adapt-then-combine (ATC) diffusion LMS over a communication
network.

Node `i` knows the row `u_i` of `U_F`, observes its own vertex, and keeps a
local estimate `s_i` of the frequency coefficients. One synchronous round
consists of

- adaptation: `psi_i = s_i + mu_i d_i (y_i - u_i^T s_i) u_i`,
- exchange: every node sends `psi_i` to each neighbour of the communication
  graph (one `|F|`-vector per edge direction),
- combination: `s_i = sum_j w_ij psi_j` over the closed neighbourhood of `i`,

after which node `i` reconstructs its own signal value `x_i = u_i^T s_i`.
The communication graph may differ from the graph that defines `U_F`.
"""

from __future__ import annotations

import sys
from typing import TYPE_CHECKING, Callable, NamedTuple

import networkx as nx  # type: ignore
import numpy as np

from graphsampling.adaptive import (
    STEADY_STATE_FRACTION,
    ObservationProcess,
    adaptive_recovery_condition,
    signal_schedule,
    steady_state_mse,
)
from graphsampling.config import default_solver_config
from graphsampling.errors import RecoveryConditionError

if TYPE_CHECKING:
    import numpy.typing as npt

    from graphsampling.adaptive import ProbabilisticSampler
    from graphsampling.noise import NoiseModel
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import (
        DiffusionCurves,
        DiffusionState,
        Matrix,
        SolverConfiguration,
        Vector,
    )

ROW_SUM_TOLERANCE = 1e-12
DRAW_CHUNK = 1000


class CommGraph:
    """
    A connected undirected communication network over the vertices `0 .. n-1`.
    """

    __slots__ = ("_graph", "_degrees")

    def __init__(self, graph: nx.Graph) -> None:
        n = graph.number_of_nodes()
        if n == 0:
            raise ValueError("The communication graph has no vertices.")
        if sorted(graph.nodes()) != list(range(n)):
            raise ValueError("Communication graph vertices must be 0 .. n-1.")
        if not nx.is_connected(graph):
            raise ValueError("The communication graph must be connected.")
        self._graph = graph
        degrees = np.array([graph.degree(i) for i in range(n)], dtype=np.int64)
        degrees.setflags(write=False)
        self._degrees = degrees

    @property
    def graph(self) -> nx.Graph:
        return self._graph

    @property
    def n(self) -> int:
        return len(self._degrees)

    @property
    def degrees(self) -> npt.NDArray[np.int64]:
        return self._degrees

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges `(i, j)` with `i < j`, sorted."""
        return sorted((min(i, j), max(i, j)) for i, j in self._graph.edges() if i != j)

    def neighbors(self, vertex: int) -> list[int]:
        return sorted(j for j in self._graph.neighbors(vertex) if j != vertex)

    def __repr__(self) -> str:
        return f"CommGraph(n={self.n}, edges={len(self.edges())})"


class CombinationMatrix:
    """
    A nonnegative row-stochastic matrix `W` whose off-diagonal support is
    confined to the edges of a communication graph.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix: Matrix, comm: CommGraph | None = None) -> None:
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("A combination matrix must be square.")
        if np.any(matrix < 0.0):
            raise ValueError("Combination weights must be nonnegative.")
        if not np.allclose(matrix.sum(axis=1), 1.0, rtol=0.0, atol=ROW_SUM_TOLERANCE):
            raise ValueError("Combination weights must sum to one on every row.")
        if comm is not None:
            if comm.n != matrix.shape[0]:
                raise ValueError(f"Weights for {matrix.shape[0]} nodes, network of {comm.n}.")
            allowed = nx.to_numpy_array(comm.graph, nodelist=range(comm.n), weight=None) > 0
            np.fill_diagonal(allowed, True)
            if np.any(matrix[~allowed] != 0.0):
                raise ValueError("Combination weights connect nodes that are not neighbours.")
        matrix.setflags(write=False)
        self._matrix = matrix

    @property
    def W(self) -> Matrix:
        return self._matrix

    @property
    def n(self) -> int:
        return self._matrix.shape[0]

    def is_doubly_stochastic(self) -> bool:
        return bool(
            np.allclose(self._matrix.sum(axis=0), 1.0, rtol=0.0, atol=ROW_SUM_TOLERANCE)
        )

    def __repr__(self) -> str:
        return f"CombinationMatrix(n={self.n})"


def _with_diagonal_remainder(off_diagonal: Matrix, comm: CommGraph) -> CombinationMatrix:
    np.fill_diagonal(off_diagonal, 0.0)
    np.fill_diagonal(off_diagonal, 1.0 - off_diagonal.sum(axis=1))
    return CombinationMatrix(off_diagonal, comm)


def metropolis_weights(comm: CommGraph) -> CombinationMatrix:
    """
    Metropolis-Hastings weights `w_ij = 1 / (1 + max(deg_i, deg_j))` on the
    edges; the diagonal takes the remainder of each row. The matrix is
    symmetric and doubly stochastic.

    Example
    -------
    >>> import networkx as nx
    >>> metropolis_weights(CommGraph(nx.complete_graph(2))).W.tolist()
    [[0.5, 0.5], [0.5, 0.5]]
    """
    weights = np.zeros((comm.n, comm.n))
    for i, j in comm.edges():
        w = 1.0 / (1.0 + max(comm.degrees[i], comm.degrees[j]))
        weights[i, j] = weights[j, i] = w
    return _with_diagonal_remainder(weights, comm)


def laplacian_weights(comm: CommGraph, epsilon: float | None = None) -> CombinationMatrix:
    """
    `W = I - epsilon L` with the unweighted Laplacian of the network;
    `epsilon` defaults to `1 / (1 + max degree)`.
    """
    if epsilon is None:
        epsilon = 1.0 / (1.0 + float(np.max(comm.degrees)))
    if not 0.0 < epsilon <= 1.0 / float(max(1, np.max(comm.degrees))):
        raise ValueError(f"epsilon = {epsilon} makes some weights negative.")
    weights = np.zeros((comm.n, comm.n))
    for i, j in comm.edges():
        weights[i, j] = weights[j, i] = epsilon
    return _with_diagonal_remainder(weights, comm)


def uniform_weights(comm: CommGraph) -> CombinationMatrix:
    """
    Each node averages its closed neighbourhood uniformly, `w_ij = 1 / (1 + deg_i)`.
    The matrix is row-stochastic but in general not symmetric.
    """
    weights = np.zeros((comm.n, comm.n))
    for i in range(comm.n):
        neighbourhood = [i] + comm.neighbors(i)
        weights[i, neighbourhood] = 1.0 / len(neighbourhood)
    return CombinationMatrix(weights, comm)


def identity_weights(n: int) -> CombinationMatrix:
    """
    `W = I`: every node keeps its own adapted estimate (no cooperation).
    """
    return CombinationMatrix(np.eye(n))


def combination_weights(comm: CommGraph, rule: str) -> CombinationMatrix:
    if rule == "metropolis":
        return metropolis_weights(comm)
    if rule == "laplacian":
        return laplacian_weights(comm)
    if rule == "uniform":
        return uniform_weights(comm)
    if rule == "identity":
        return identity_weights(comm.n)
    raise ValueError(f"Unknown combination rule `{rule}`.")


class MessageBus:
    """
    A synchronous in-process message fabric over a communication network.

    Each call to :meth:`exchange` is one round in which every node sends one
    vector to each of its neighbours.
    """

    def __init__(self, comm: CommGraph) -> None:
        sources: list[int] = []
        targets: list[int] = []
        for i, j in comm.edges():
            sources += [i, j]
            targets += [j, i]
        self.comm = comm
        self.sources = np.array(sources, dtype=np.int64)
        self.targets = np.array(targets, dtype=np.int64)
        self.round_counts: list[int] = []
        links = np.eye(comm.n, dtype=bool)
        links[self.targets, self.sources] = True
        self._links = links

    def carries(self, W: CombinationMatrix) -> bool:
        """
        Whether every nonzero off-diagonal weight of `W` lies on a link of
        the network.
        """
        if W.n != self.comm.n:
            return False
        return not bool(np.any(W.W[~self._links] != 0.0))

    @property
    def total_messages(self) -> int:
        return sum(self.round_counts)

    def exchange(
        self, payload: npt.NDArray[np.float64]
    ) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.float64]]:
        """
        Deliver the node vectors `payload[..., i, :]`.

        Returns
        -------
        tuple
            `(sources, targets, messages)`, where `messages[..., m, :]` is the
            vector that `sources[m]` sent to `targets[m]`.
        """
        if payload.shape[-2] != self.comm.n:
            raise ValueError(
                f"Payload for {payload.shape[-2]} nodes, network of {self.comm.n}."
            )
        messages = payload[..., self.sources, :]
        self.round_counts.append(len(self.sources))
        return self.sources, self.targets, messages


class NodeState(NamedTuple):
    """
    The view of a single node: its coefficient estimate, its latest adapted
    estimate, its step size and its regressor row `u_i` of `U_F`.
    """

    s: Vector
    psi: Vector
    mu: float
    regressor: Vector


def initial_diffusion_state(
    basis: SpectralBasis, replicas: int = 1, s0: Vector | None = None
) -> DiffusionState:
    """
    Every node starts from the coefficient vector `s0` (zero by default).
    """
    start = np.zeros(basis.bandwidth) if s0 is None else np.asarray(s0, dtype=np.float64)
    if start.shape != (basis.bandwidth,):
        raise ValueError(f"Initial coefficients must have length {basis.bandwidth}.")
    coefficients = np.tile(start, (replicas, basis.n, 1))
    return {
        "coefficients": coefficients,
        "intermediate": coefficients.copy(),
        "iteration": 0,
    }


def _node_steps(mu: float | Vector, n: int) -> Vector:
    steps = np.broadcast_to(np.asarray(mu, dtype=np.float64), (n,)).copy()
    if np.any(steps <= 0.0):
        raise ValueError("Step sizes must be positive.")
    return steps


def node_states(
    state: DiffusionState, basis: SpectralBasis, mu: float | Vector, replica: int = 0
) -> list[NodeState]:
    steps = _node_steps(mu, basis.n)
    return [
        NodeState(
            state["coefficients"][replica, i],
            state["intermediate"][replica, i],
            float(steps[i]),
            basis.U_F[i],
        )
        for i in range(basis.n)
    ]


def local_estimates(state: DiffusionState, basis: SpectralBasis) -> Matrix:
    """
    The reconstructions `x_i = u_i^T s_i`, one row per replica.
    """
    return np.einsum("rnk,nk->rn", state["coefficients"], basis.U_F)


def diffusion_step(
    state: DiffusionState,
    basis: SpectralBasis,
    W: CombinationMatrix,
    masks: Matrix,
    observations: Matrix,
    mu: float | Vector,
    bus: MessageBus,
) -> DiffusionState:
    """
    One adapt-then-combine round.

    Parameters
    ----------
    state : DiffusionState
        The network state, arrays of shape `(replicas, n, |F|)`.
    basis : SpectralBasis
        The processing basis; node `i` uses row `i` of `U_F`.
    W : CombinationMatrix
        The combination weights; must respect the network of `bus`.
    masks, observations : Matrix
        The sampling indicators `d_i` and observations `y_i`, of shape
        `(replicas, n)`.
    mu : float | Vector
        A common step size or one per node.
    bus : MessageBus
        The fabric that carries the adapted estimates.

    Returns
    -------
    DiffusionState
        The state after the round.

    Raises
    ------
    ValueError
        If `W` places weight on a pair of nodes that `bus` does not connect.
    """
    if not bus.carries(W):
        raise ValueError("Combination weights connect nodes that are not neighbours.")
    U = basis.U_F
    steps = _node_steps(mu, basis.n)
    coefficients = state["coefficients"]
    local = np.einsum("rnk,nk->rn", coefficients, U)
    innovation = steps * masks * (observations - local)
    psi = coefficients + innovation[..., None] * U

    sources, targets, messages = bus.exchange(psi)
    weights = W.W[targets, sources]
    combined = W.W.diagonal()[:, None] * psi
    np.add.at(combined, (slice(None), targets), weights[None, :, None] * messages)

    return {
        "coefficients": combined,
        "intermediate": psi,
        "iteration": state["iteration"] + 1,
    }


def matched_step_size(mu_centralized: float, n: int) -> float:
    """
    The node step size `n mu` for which the network-average recursion with a
    doubly-stochastic `W` matches centralized LMS with step size `mu`.
    """
    return n * mu_centralized


def diffusion_run(
    basis: SpectralBasis,
    comm: CommGraph,
    x_true: Vector | Matrix | Callable[[int], Vector],
    sampler: ProbabilisticSampler,
    noise: NoiseModel,
    steps: int,
    mu: float | Vector,
    weights: CombinationMatrix | None = None,
    replicas: int = 1,
    config: SolverConfiguration | None = None,
) -> DiffusionCurves:
    """
    Simulate diffusion LMS for `steps` rounds and record normalized errors.

    The per-node error is `n (x_hat_i - x_i)^2 / ||x||^2`, so the mean over
    nodes is the network NMSE `||x_hat - x||^2 / ||x||^2`. Errors are averaged
    over the replicas.

    Raises
    ------
    RecoveryConditionError
        If the expected sampling set does not determine the bandlimited signals.
    """
    if config is None:
        config = default_solver_config()
    if comm.n != basis.n:
        raise ValueError(f"Network of {comm.n} nodes, basis of {basis.n} vertices.")
    condition = adaptive_recovery_condition(basis, sampler)
    if not condition["ok"]:
        raise RecoveryConditionError(
            "The expected sampling set does not determine the bandlimited signals",
            condition["norm"],
        )
    if weights is None:
        weights = metropolis_weights(comm)

    signal_at = signal_schedule(x_true, steps)
    process = ObservationProcess(sampler, noise, replicas)
    bus = MessageBus(comm)
    state = initial_diffusion_state(basis, replicas)
    n = basis.n

    def node_errors(time: int) -> Vector:
        x = signal_at(time)
        energy = float(np.sum(x**2))
        if energy == 0.0:
            raise ValueError("NMSE is undefined for the zero signal.")
        squared = (local_estimates(state, basis) - x) ** 2
        return n * np.mean(squared, axis=0) / energy

    node_nmse = np.empty((steps + 1, n))
    node_nmse[0] = node_errors(0)
    done = 0
    while done < steps:
        size = min(DRAW_CHUNK, steps - done)
        masks, noise_draws = process.draw(size)
        for t in range(size):
            time = done + t
            mask = masks[t].astype(np.float64)
            observations = mask * (signal_at(time) + noise_draws[t])
            state = diffusion_step(state, basis, weights, mask, observations, mu, bus)
            node_nmse[time + 1] = node_errors(time + 1)
        done += size
        if config["debug"]:
            print(
                f"[diffusion] Round {done}: network NMSE {np.mean(node_nmse[done]):.6e}.",
                file=sys.stderr,
            )

    network = node_nmse.mean(axis=1)
    return {
        "node_nmse": node_nmse,
        "network_nmse": network,
        "steady_state": steady_state_mse(network, STEADY_STATE_FRACTION),
        "messages_per_round": list(bus.round_counts),
        "total_messages": bus.total_messages,
    }
