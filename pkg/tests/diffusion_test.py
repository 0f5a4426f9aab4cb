import networkx as nx  # type: ignore
import numpy as np
import pytest

from graphsampling.adaptive import ProbabilisticSampler, lms_run, steady_state_mse
from graphsampling.diffusion import (
    CombinationMatrix,
    CommGraph,
    MessageBus,
    combination_weights,
    diffusion_run,
    diffusion_step,
    identity_weights,
    initial_diffusion_state,
    laplacian_weights,
    local_estimates,
    matched_step_size,
    metropolis_weights,
    node_states,
    uniform_weights,
)
from graphsampling.errors import RecoveryConditionError
from graphsampling.graph_utils import generate_graph, shift_operator
from graphsampling.noise import NoiseModel
from graphsampling.seeding import make_generator
from graphsampling.spectral import spectral_decompose, synthesize_bandlimited


def _basis(spec: str, bandwidth: int, seed: int = 0):
    graph = generate_graph(spec, seed)
    return graph, spectral_decompose(shift_operator(graph), frequencies=range(bandwidth))


def test_comm_graph_validation():
    comm = CommGraph(nx.path_graph(3))
    assert comm.n == 3
    assert comm.degrees.tolist() == [1, 2, 1]
    assert comm.edges() == [(0, 1), (1, 2)]
    assert comm.neighbors(1) == [0, 2]

    with pytest.raises(ValueError):
        CommGraph(nx.Graph())
    with pytest.raises(ValueError):
        CommGraph(nx.relabel_nodes(nx.path_graph(3), {0: 5}))
    disconnected = nx.Graph()
    disconnected.add_edges_from([(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        CommGraph(disconnected)


def test_weight_rules():
    comm = CommGraph(nx.path_graph(3))

    metropolis = metropolis_weights(comm)
    assert np.allclose(
        metropolis.W, [[2 / 3, 1 / 3, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 1 / 3, 2 / 3]]
    )
    assert metropolis.is_doubly_stochastic()
    assert np.array_equal(metropolis.W, metropolis.W.T)

    assert np.allclose(laplacian_weights(comm).W, metropolis.W)
    assert np.allclose(laplacian_weights(comm, 0.5).W.diagonal(), [0.5, 0.0, 0.5])
    with pytest.raises(ValueError):
        laplacian_weights(comm, 0.6)

    uniform = uniform_weights(comm)
    assert np.allclose(uniform.W.sum(axis=1), 1.0)
    assert not uniform.is_doubly_stochastic()

    assert np.array_equal(identity_weights(3).W, np.eye(3))
    assert np.array_equal(combination_weights(comm, "identity").W, np.eye(3))
    with pytest.raises(ValueError):
        combination_weights(comm, "max-degree")

    with pytest.raises(ValueError):
        metropolis.W[0, 0] = 1.0


def test_combination_matrix_validation():
    comm = CommGraph(nx.path_graph(3))
    with pytest.raises(ValueError):
        CombinationMatrix([[1.5, -0.5], [0.0, 1.0]])
    with pytest.raises(ValueError):
        CombinationMatrix([[0.5, 0.4], [0.0, 1.0]])
    with pytest.raises(ValueError):
        CombinationMatrix(np.ones((2, 3)) / 3)
    # Nodes 0 and 2 are not neighbours.
    with pytest.raises(ValueError):
        CombinationMatrix([[0.5, 0.0, 0.5], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], comm)
    with pytest.raises(ValueError):
        CombinationMatrix(np.eye(2), comm)


def test_message_bus():
    comm = CommGraph(nx.path_graph(4))
    bus = MessageBus(comm)
    payload = np.arange(8, dtype=np.float64).reshape(4, 2)
    sources, targets, messages = bus.exchange(payload)
    assert sorted(zip(sources.tolist(), targets.tolist())) == [
        (0, 1),
        (1, 0),
        (1, 2),
        (2, 1),
        (2, 3),
        (3, 2),
    ]
    assert np.array_equal(messages, payload[sources])
    bus.exchange(payload)
    assert bus.round_counts == [6, 6]
    assert bus.total_messages == 12

    with pytest.raises(ValueError):
        bus.exchange(np.zeros((3, 2)))


def test_diffusion_step_matches_dense_combination(instance_seed: int):
    graph, basis = _basis("er(15, 0.3)", 3, instance_seed)
    comm = CommGraph(graph)
    W = metropolis_weights(comm)
    generator = make_generator(instance_seed)

    state = initial_diffusion_state(basis, replicas=2, s0=generator.standard_normal(3))
    masks = (generator.random((2, 15)) < 0.5).astype(np.float64)
    observations = masks * generator.standard_normal((2, 15))
    mu = generator.uniform(0.1, 0.9, 15)
    bus = MessageBus(comm)
    after = diffusion_step(state, basis, W, masks, observations, mu, bus)

    assert after["iteration"] == 1
    for r in range(2):
        local = np.sum(state["coefficients"][r] * basis.U_F, axis=1)
        innovation = mu * masks[r] * (observations[r] - local)
        psi = state["coefficients"][r] + innovation[:, None] * basis.U_F
        assert np.allclose(after["intermediate"][r], psi)
        assert np.allclose(after["coefficients"][r], W.W @ psi)
    assert bus.round_counts == [2 * len(comm.edges())]

    views = node_states(after, basis, mu, replica=1)
    assert len(views) == 15
    assert np.array_equal(views[4].s, after["coefficients"][1, 4])
    assert views[4].mu == mu[4]
    assert np.array_equal(views[4].regressor, basis.U_F[4])
    assert np.allclose(
        local_estimates(after, basis)[1, 4], float(views[4].s @ views[4].regressor)
    )

    with pytest.raises(ValueError):
        diffusion_step(state, basis, W, masks, observations, 0.0, bus)
    with pytest.raises(ValueError):
        initial_diffusion_state(basis, s0=np.zeros(4))


def test_full_averaging_reproduces_centralized_lms():
    _, basis = _basis("er(20, 0.3)", 4, 2)
    comm = CommGraph(generate_graph("complete(20)"))
    W = metropolis_weights(comm)
    assert np.allclose(W.W, 1 / 20)

    x = synthesize_bandlimited(basis, seed=2)
    sampler = ProbabilisticSampler.uniform(20, 0.5, seed=8)
    noise = NoiseModel.homoscedastic(20, 0.01)
    mu = 0.05

    centralized = lms_run(basis, x, sampler, noise, mu, 500)
    distributed = diffusion_run(
        basis, comm, x, sampler, noise, 500, matched_step_size(mu, 20), W
    )
    assert np.allclose(
        distributed["network_nmse"], centralized["squared_errors"] / float(x @ x), rtol=1e-6
    )
    assert np.allclose(distributed["node_nmse"].mean(axis=1), distributed["network_nmse"])


def test_diffusion_converges_without_noise(instance_seed: int):
    graph, basis = _basis("er(20, 0.3)", 3, instance_seed)
    comm = CommGraph(graph)
    x = synthesize_bandlimited(basis, seed=instance_seed)
    sampler = ProbabilisticSampler.uniform(20, 0.5, seed=instance_seed)

    curves = diffusion_run(
        basis, comm, x, sampler, NoiseModel.noiseless(20), 3000, 0.5, replicas=2
    )
    assert curves["node_nmse"].shape == (3001, 20)
    assert curves["network_nmse"][0] == pytest.approx(1.0)
    assert curves["network_nmse"][-1] <= 1e-6
    assert curves["steady_state"] <= 1e-6
    assert curves["messages_per_round"] == [2 * len(comm.edges())] * 3000
    assert curves["total_messages"] == 3000 * 2 * len(comm.edges())


def test_diffusion_run_errors():
    graph, basis = _basis("er(12, 0.4)", 3, 1)
    comm = CommGraph(graph)
    x = synthesize_bandlimited(basis, seed=1)
    noise = NoiseModel.noiseless(12)
    half = ProbabilisticSampler.uniform(12, 0.5)

    with pytest.raises(RecoveryConditionError):
        diffusion_run(basis, comm, x, ProbabilisticSampler.uniform(12, 0.0), noise, 10, 0.5)
    with pytest.raises(ValueError):
        diffusion_run(basis, comm, np.zeros(12), half, noise, 10, 0.5)
    with pytest.raises(ValueError):
        diffusion_run(basis, CommGraph(nx.path_graph(5)), x, half, noise, 10, 0.5)


def test_matched_step_size():
    assert matched_step_size(0.01, 20) == pytest.approx(0.2)


def test_diffusion_step_rejects_weights_off_the_network():
    graph, basis = _basis("path(4)", 2)
    bus = MessageBus(CommGraph(graph))
    state = initial_diffusion_state(basis)
    zeros = np.zeros((1, 4))

    dense = metropolis_weights(CommGraph(generate_graph("complete(4)")))
    with pytest.raises(ValueError):
        diffusion_step(state, basis, dense, zeros, zeros, 0.5, bus)
    with pytest.raises(ValueError):
        diffusion_step(state, basis, identity_weights(5), zeros, zeros, 0.5, bus)
    assert bus.round_counts == []

    assert bus.carries(identity_weights(4))
    assert bus.carries(uniform_weights(CommGraph(graph)))


def test_diffusion_step_spreads_one_hop():
    graph, basis = _basis("path(6)", 2)
    comm = CommGraph(graph)
    state = initial_diffusion_state(basis)
    masks = np.zeros((1, 6))
    masks[0, 2] = 1.0
    observations = 3.0 * masks

    W = metropolis_weights(comm)
    after = diffusion_step(state, basis, W, masks, observations, 0.5, MessageBus(comm))
    reached = np.flatnonzero(np.any(after["coefficients"][0] != 0.0, axis=1))
    assert reached.tolist() == [1, 2, 3]
    adapted = np.flatnonzero(np.any(after["intermediate"][0] != 0.0, axis=1))
    assert adapted.tolist() == [2]


def test_uncooperative_nodes_do_not_converge():
    graph, basis = _basis("er(20, 0.3)", 3, 3)
    comm = CommGraph(graph)
    x = synthesize_bandlimited(basis, seed=3)
    sampler = ProbabilisticSampler([0.5] * 14 + [0.0] * 6, seed=5)
    noise = NoiseModel.noiseless(20)

    alone = diffusion_run(basis, comm, x, sampler, noise, 3000, 0.5, identity_weights(20))
    # Unsampled nodes keep their initial zero estimate.
    energy = float(x @ x)
    assert np.allclose(alone["node_nmse"][-1, 14:], 20 * x[14:] ** 2 / energy)
    assert alone["network_nmse"][-1] >= float(np.sum(x[14:] ** 2)) / energy - 1e-9
    assert alone["total_messages"] == 3000 * 2 * len(comm.edges())

    W = metropolis_weights(comm)
    together = diffusion_run(basis, comm, x, sampler, noise, 3000, 0.5, W)
    assert together["network_nmse"][-1] <= 1e-3


def test_consensus_reaches_the_weighted_average(instance_seed: int):
    graph, basis = _basis("er(15, 0.3)", 3, instance_seed)
    comm = CommGraph(graph)
    W = uniform_weights(comm)
    # The left Perron vector of uniform weights is proportional to 1 + degree.
    pi = (1.0 + comm.degrees) / float(np.sum(1.0 + comm.degrees))
    assert np.allclose(pi @ W.W, pi)

    start = make_generator(instance_seed).standard_normal((1, 15, 3))
    state = {"coefficients": start, "intermediate": start.copy(), "iteration": 0}
    zeros = np.zeros((1, 15))
    bus = MessageBus(comm)
    for _ in range(1000):
        state = diffusion_step(state, basis, W, zeros, zeros, 0.5, bus)

    target = pi @ start[0]
    assert np.allclose(state["coefficients"][0], target, atol=1e-9)
    assert not np.allclose(target, start[0].mean(axis=0))


def test_separate_communication_graph_stays_near_centralized_lms():
    _, basis = _basis("er(30, 0.2)", 3, 4)
    comm = CommGraph(generate_graph("er(30, 0.25)", 9))
    x = synthesize_bandlimited(basis, seed=4)
    sampler = ProbabilisticSampler.uniform(30, 1.0, seed=6)
    noise = NoiseModel.homoscedastic(30, 0.1)
    mu, steps = 0.01, 4000

    centralized = lms_run(basis, x, sampler, noise, mu, steps, replicas=20)
    reference = steady_state_mse(centralized["squared_errors"] / float(x @ x))
    distributed = diffusion_run(
        basis, comm, x, sampler, noise, steps, matched_step_size(mu, 30), replicas=20
    )
    assert distributed["steady_state"] <= 3 * reference
    assert distributed["steady_state"] >= 0.8 * reference
