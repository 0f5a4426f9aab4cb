import math

import numpy as np
import pytest

from graphsampling._design_algorithms.ordering import improves
from graphsampling.config import default_solver_config
from graphsampling.design import (
    DesignCriterion,
    exhaustive_select,
    greedy_select,
    information_rank,
    objective,
    random_select,
    relaxed_gradient,
    relaxed_objective,
    relaxed_select,
)
from graphsampling.graph_utils import generate_graph, make_graph, shift_operator
from graphsampling.noise import NoiseModel
from graphsampling.seeding import make_generator
from graphsampling.spectral import spectral_decompose


def _basis(n: int, bandwidth: int, seed: int, probability: float = 0.3):
    graph = generate_graph(f"er({n}, {probability})", seed)
    return spectral_decompose(shift_operator(graph), frequencies=range(bandwidth))


def test_objective_definitions():
    basis = spectral_decompose(shift_operator(generate_graph("path(3)")), frequencies=[0])
    for kind in ("A", "E", "D"):
        assert objective(DesignCriterion.unit(kind, 3), basis, ()) == 0.0

    # u_F = (1, 1, 1) / sqrt(3), so G({v}) = 1/3 for every vertex.
    assert objective(DesignCriterion.unit("A", 3), basis, (1,)) == pytest.approx(-3.0)
    assert objective(DesignCriterion.unit("D", 3), basis, (1,)) == pytest.approx(-math.log(3.0))
    assert objective(DesignCriterion.unit("E", 3), basis, (1,)) == pytest.approx(
        1 / math.sqrt(3.0)
    )
    assert objective(DesignCriterion.unit("A", 3), basis, (0, 1, 2)) == pytest.approx(-1.0)

    # Noise scales the information matrix.
    noisy = DesignCriterion("A", NoiseModel([4.0, 4.0, 4.0]))
    assert objective(noisy, basis, (0, 1, 2)) == pytest.approx(-4.0)

    wide = spectral_decompose(shift_operator(generate_graph("path(3)")), frequencies=[0, 1])
    assert objective(DesignCriterion.unit("E", 3), wide, (0,)) == 0.0
    assert information_rank(wide, (0,)) == 1


def test_criterion_validation():
    with pytest.raises(ValueError):
        DesignCriterion("B", NoiseModel.homoscedastic(3, 1.0))  # type: ignore
    with pytest.raises(ValueError):
        DesignCriterion("A", NoiseModel([1.0, 0.0, 1.0]))


def test_relaxed_objective_at_binary_points(instance_seed: int):
    basis = _basis(15, 4, instance_seed)
    vertices = (0, 3, 5, 8, 11, 14)
    d = np.zeros(15)
    d[list(vertices)] = 1.0
    noise = NoiseModel(np.linspace(0.5, 2.0, 15))
    for kind in ("A", "E", "D"):
        criterion = DesignCriterion(kind, noise)
        if information_rank(basis, vertices) < basis.bandwidth:
            continue
        assert relaxed_objective(criterion, basis, d) == pytest.approx(
            -objective(criterion, basis, vertices), rel=1e-9
        )


def test_relaxed_gradients_match_finite_differences(instance_seed: int):
    basis = _basis(12, 3, instance_seed)
    generator = make_generator(instance_seed)
    noise = NoiseModel(generator.uniform(0.5, 2.0, 12))
    h = 1e-5
    for kind in ("A", "E", "D"):
        criterion = DesignCriterion(kind, noise)
        for _ in range(20):
            d = generator.uniform(0.2, 0.8, 12)
            gradient = relaxed_gradient(criterion, basis, d)
            numeric = np.empty(12)
            for i in range(12):
                step = np.zeros(12)
                step[i] = h
                numeric[i] = (
                    relaxed_objective(criterion, basis, d + step)
                    - relaxed_objective(criterion, basis, d - step)
                ) / (2 * h)
            error = np.linalg.norm(gradient - numeric) / np.linalg.norm(gradient)
            assert error <= 1e-4


def test_greedy_d_design_is_near_optimal(instance_seed: int):
    basis = _basis(12, 3, instance_seed, 0.35)
    criterion = DesignCriterion("D", NoiseModel.homoscedastic(12, 1e-3))

    best = exhaustive_select(criterion, basis, 4)
    greedy = greedy_select(criterion, basis, 4)
    assert len(greedy) == 4
    assert information_rank(basis, greedy) == 3

    optimum = objective(criterion, basis, best)
    value = objective(criterion, basis, greedy)
    assert value <= optimum + 1e-9
    assert value >= (1 - 1 / math.e) * optimum


def test_d_objective_is_submodular_on_full_rank_sets(instance_seed: int):
    basis = _basis(12, 3, instance_seed)
    criterion = DesignCriterion("D", NoiseModel.homoscedastic(12, 0.1))
    generator = make_generator(instance_seed)

    checked = 0
    for _ in range(40_000):
        if checked == 10_000:
            break
        size = int(generator.integers(4, 10))
        b_set = set(int(v) for v in generator.choice(12, size=size, replace=False))
        a_set = set(v for v in b_set if generator.random() < 0.7)
        outside = [v for v in range(12) if v not in b_set]
        a = int(generator.choice(outside))
        a_vertices = tuple(sorted(a_set))
        if information_rank(basis, a_vertices) < 3:
            continue

        def f(vertices: set[int]) -> float:
            return objective(criterion, basis, tuple(sorted(vertices)))

        gain_small = f(a_set | {a}) - f(a_set)
        gain_large = f(b_set | {a}) - f(b_set)
        assert gain_small >= gain_large - 1e-9
        checked += 1
    assert checked == 10_000


def test_a_and_e_objectives_are_not_submodular():
    basis = _basis(12, 3, 0)
    generator = make_generator(0)
    for kind in ("A", "E"):
        criterion = DesignCriterion.unit(kind, 12)

        def f(vertices: set[int]) -> float:
            return objective(criterion, basis, tuple(sorted(vertices)))

        violated = False
        for _ in range(10_000):
            size = int(generator.integers(1, 8))
            b_set = set(int(v) for v in generator.choice(12, size=size, replace=False))
            a_set = set(v for v in b_set if generator.random() < 0.5)
            a = int(generator.choice([v for v in range(12) if v not in b_set]))
            if f(a_set | {a}) - f(a_set) < f(b_set | {a}) - f(b_set) - 1e-9:
                violated = True
                break
        assert violated


def test_selection_key_is_monotone(instance_seed: int):
    basis = _basis(12, 3, instance_seed)
    generator = make_generator(instance_seed)
    for kind in ("A", "E", "D"):
        criterion = DesignCriterion.unit(kind, 12)

        def key(vertices: set[int]) -> tuple[int, float]:
            ordered = tuple(sorted(vertices))
            return criterion.rank(basis, ordered), criterion.objective(basis, ordered)

        for _ in range(300):
            size = int(generator.integers(0, 12))
            s_set = set(int(v) for v in generator.choice(12, size=size, replace=False))
            a = int(generator.choice([v for v in range(12) if v not in s_set]))
            before, after = key(s_set), key(s_set | {a})
            assert after[0] >= before[0]
            assert not improves(before, after)


def test_selection_strategies(instance_seed: int):
    basis = _basis(14, 4, instance_seed)
    config = default_solver_config()
    for kind in ("A", "E", "D"):
        criterion = DesignCriterion.unit(kind, 14)
        best = exhaustive_select(criterion, basis, 5, config)
        greedy = greedy_select(criterion, basis, 5, config)
        design, rounded = relaxed_select(criterion, basis, 5, config)

        assert len(best) == len(greedy) == len(rounded) == 5
        optimum = objective(criterion, basis, best)
        for candidate in (greedy, rounded):
            if information_rank(basis, candidate) == basis.bandwidth:
                assert objective(criterion, basis, candidate) <= optimum + 1e-9
        assert design["objective"] == objective(criterion, basis, rounded)

        weights = design["weights"]
        assert float(np.sum(weights)) == pytest.approx(5.0, abs=1e-8)
        assert np.all(weights >= 0.0) and np.all(weights <= 1.0)
        # The rounded set holds the largest weights.
        outside = [v for v in range(14) if v not in rounded]
        assert min(weights[list(rounded)]) >= max(weights[outside])
        # The relaxation is a lower bound of the binary problem.
        if kind != "E":
            assert design["relaxed_objective"] <= -optimum + 1e-6


def test_selection_edge_cases():
    basis = _basis(8, 2, 1)
    criterion = DesignCriterion.unit("D", 8)
    assert greedy_select(criterion, basis, 0) == ()
    assert exhaustive_select(criterion, basis, 8) == tuple(range(8))
    design, rounded = relaxed_select(criterion, basis, 8)
    assert rounded == tuple(range(8))
    assert design["iterations"] == 0

    with pytest.raises(ValueError):
        greedy_select(criterion, basis, 9)

    config = default_solver_config()
    config["exhaustive_limit"] = 10
    with pytest.raises(ValueError):
        exhaustive_select(criterion, basis, 4, config)


def test_random_selection_is_seeded():
    assert random_select(20, 6, 5) == random_select(20, 6, 5)
    assert len(set(random_select(20, 6, 5))) == 6
    with pytest.raises(ValueError):
        random_select(3, 4, 0)


def test_relaxed_d_design_on_a_single_edge():
    basis = spectral_decompose(shift_operator(generate_graph("complete(2)")), frequencies=[0])
    design, rounded = relaxed_select(DesignCriterion.unit("D", 2), basis, 1)
    assert np.allclose(design["weights"], [0.5, 0.5], atol=1e-9)
    assert rounded == (0,)


def test_greedy_design_covers_every_component():
    edges = [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0)]
    basis = spectral_decompose(shift_operator(make_graph(6, edges)), frequencies=[0, 1])
    assert basis.eigenvalues[1] == pytest.approx(0.0, abs=1e-9)
    assert greedy_select(DesignCriterion.unit("A", 6), basis, 2) == (0, 3)


def test_relaxed_design_beats_the_median_random_set(instance_seed: int):
    basis = _basis(30, 4, instance_seed, 0.2)
    criterion = DesignCriterion.unit("D", 30)
    _, rounded = relaxed_select(criterion, basis, 8)

    def key(vertices: tuple[int, ...]) -> tuple[int, float]:
        return criterion.rank(basis, vertices), criterion.objective(basis, vertices)

    relaxed_key = key(rounded)
    better = sum(
        improves(key(random_select(30, 8, seed)), relaxed_key)
        for seed in range(1000 * instance_seed, 1000 * instance_seed + 101)
    )
    assert better <= 50


def test_relaxed_design_reports_a_stalled_line_search(monkeypatch):
    basis = _basis(12, 3, 0)
    criterion = DesignCriterion.unit("D", 12)
    exact = DesignCriterion.relaxed_objective
    calls: list[int] = []

    # Every point but the starting one looks worse than the start.
    def stalled(self, basis, weights):
        calls.append(0)
        return exact(self, basis, weights) + (0.0 if len(calls) == 1 else 1e6)

    monkeypatch.setattr(DesignCriterion, "relaxed_objective", stalled)
    design, rounded = relaxed_select(criterion, basis, 4)
    assert not design["converged"]
    assert design["iterations"] == 1
    assert len(rounded) == 4
