import numpy as np
import pytest

from graphsampling.noise import NoiseModel
from graphsampling.seeding import make_generator
from graphsampling.vertex_utils import (
    complement,
    indicator,
    make_vertex_set,
    selection_matrix,
    vertex_limiting,
)


def test_vertex_sets():
    assert make_vertex_set([4, 0, 4, 2], 5) == (0, 2, 4)
    assert make_vertex_set([], 3) == ()
    assert complement((0, 2, 4), 5) == (1, 3)
    with pytest.raises(ValueError):
        make_vertex_set([5], 5)
    with pytest.raises(ValueError):
        make_vertex_set([-1], 5)


def test_vertex_operators():
    vertices = (1, 3)
    assert indicator(vertices, 4).tolist() == [0.0, 1.0, 0.0, 1.0]
    limiting = vertex_limiting(vertices, 4)
    selection = selection_matrix(vertices, 4)
    assert selection.shape == (4, 2)
    assert np.array_equal(selection @ selection.T, limiting)
    assert np.array_equal(selection.T @ selection, np.eye(2))


def test_noise_model():
    noise = NoiseModel([0.5, 0.0, 2.0])
    assert noise.n == 3
    assert noise.restrict((0, 2)).tolist() == [0.5, 2.0]
    assert not noise.is_positive()
    assert noise.is_positive((0, 2))
    assert np.array_equal(noise.covariance(), np.diag([0.5, 0.0, 2.0]))
    assert NoiseModel.homoscedastic(2, 0.1).variances.tolist() == [0.1, 0.1]

    draws = noise.sample(make_generator(1), (4,))
    assert draws.shape == (4, 3)
    assert np.all(draws[:, 1] == 0.0)

    with pytest.raises(ValueError):
        NoiseModel([])
    with pytest.raises(ValueError):
        NoiseModel([1.0, -1.0])
    with pytest.raises(ValueError):
        NoiseModel([1.0, float("nan")])
    with pytest.raises(ValueError):
        noise.variances[0] = 1.0
