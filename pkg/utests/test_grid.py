import math
import warnings

import numpy as np
import pytest

from blowuplab.grid import CollocationGrid, GridFunctionPair, _differentiation_matrices, clenshaw_curtis_weights
from blowuplab.utils import DimensionMismatch, ParameterError, UnderResolved

grids = {}


def setup_module(module):
    for N in (8, 16, 32, 33):
        grids[N] = CollocationGrid(N)


def teardown_module(module):
    grids.clear()


@pytest.mark.parametrize('N', [8, 16, 32, 33], ids=['N8', 'N16', 'N32', 'N33'])
def test_nodes(N):
    y = grids[N].nodes
    assert y[0] == 1. and y[-1] == -1.
    assert np.all(np.diff(y) < 0)
    assert grids[N].size == N + 1
    if N % 2 == 0:
        assert y[N // 2] == 0.


@pytest.mark.parametrize('N', [8, 16, 33], ids=['N8', 'N16', 'N33'])
def test_quadrature(N):
    grid = grids[N]
    y = grid.nodes
    assert abs(grid.integrate(np.ones_like(y)) - 2) < 1e-14
    assert abs(grid.integrate(y * y) - 2. / 3) < 1e-14
    assert abs(grid.integrate(y ** 5)) < 1e-14
    if N >= 16:
        assert abs(grid.integrate(np.exp(y)) - (math.e - 1 / math.e)) < 1e-13


def test_weights_positive():
    for N in (4, 5, 64):
        w = clenshaw_curtis_weights(N)
        assert np.all(w > 0)
        assert abs(w.sum() - 2) < 1e-13


def test_derivative_matrices_on_polynomials():
    grid = grids[16]
    y = grid.nodes
    assert np.max(np.abs(grid.derivative(y ** 3) - 3 * y * y)) < 1e-12
    assert np.max(np.abs(grid.derivative(y ** 3, 2) - 6 * y)) < 1e-11
    assert np.allclose(grid.derivative_matrix(0), np.eye(17))
    assert np.max(np.abs(grid.diff_matrix.sum(axis=1))) < 1e-12


def test_differentiation_matrix_entries():
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        d1, d2 = _differentiation_matrices.__wrapped__(9, 2)
    assert d1.shape == d2.shape == (9, 9)
    assert d1[0, 0] == pytest.approx((2 * 8 ** 2 + 1) / 6.)
    assert d1[0, 1] == pytest.approx(-2. / (1 - math.cos(math.pi / 8)))
    assert d1[0, 8] == pytest.approx(0.5)
    assert d1[8, 8] == pytest.approx(-d1[0, 0])
    assert np.allclose(d2, d1.dot(d1), atol=1e-9)


def test_derivative_on_smooth_function():
    grid = grids[32]
    y = grid.nodes
    assert np.max(np.abs(grid.derivative(np.sin(2 * y)) - 2 * np.cos(2 * y))) < 1e-11


def test_derivative_order_limits():
    grid = grids[8]
    grid.derivative_matrix(4)
    with pytest.raises(UnderResolved):
        grid.derivative_matrix(5)
    with pytest.raises(UnderResolved):
        grid.clean_derivative(grid.nodes, 5)
    with pytest.raises(ParameterError):
        CollocationGrid(3)


def test_coefficients():
    grid = grids[8]
    y = grid.nodes
    t3 = 4 * y ** 3 - 3 * y
    c = grid.coefficients(t3)
    expected = np.zeros(9)
    expected[3] = 1.
    assert np.max(np.abs(c - expected)) < 1e-14
    c = grid.coefficients(t3 + 2j * y)
    assert abs(c[1] - 2j) < 1e-14
    assert np.max(np.abs(grid.evaluate(grid.coefficients(t3)) - t3)) < 1e-14


def test_interpolate_and_clean_derivative():
    grid = grids[32]
    y = grid.nodes
    values = np.sin(2 * y)
    points = np.array([-0.77, 0.1, 0.5])
    assert np.max(np.abs(grid.interpolate(values, points) - np.sin(2 * points))) < 1e-14
    assert np.max(np.abs(grid.clean_derivative(values, 3) + 8 * np.cos(2 * y))) < 1e-7
    assert np.max(np.abs(grid.clean_derivative(values, 0) - values)) < 1e-14
    chopped = grid.chopped_coefficients(values)
    assert np.all(chopped[-5:] == 0)


def test_resolution_filter():
    grid = grids[32]
    y = grid.nodes
    assert grid.resolved(np.exp(y))
    noise = np.random.default_rng(0).standard_normal(grid.size)
    assert not grid.resolved(noise)
    assert grid.tail_energy(np.zeros(grid.size)) == 0.


def test_grid_equality():
    assert CollocationGrid(16) == grids[16]
    assert CollocationGrid(16) != grids[8]
    assert len({CollocationGrid(16), grids[16]}) == 1


def test_pair_arithmetic():
    grid = grids[8]
    y = grid.nodes
    p = GridFunctionPair.from_callables(grid, lambda x: x, lambda x: 1.)
    q = GridFunctionPair(grid, y * y, -y)
    r = 2 * p - q / 2 + (-q)
    assert np.allclose(r.q1, 2 * y - 1.5 * y * y)
    assert np.allclose(r.q2, 2 + 1.5 * y)
    assert p.q2.dtype == complex
    assert np.allclose(GridFunctionPair.from_vector(grid, q.to_vector()).q1, q.q1)
    assert GridFunctionPair.zeros(grid).is_finite()


def test_pair_validation():
    grid = grids[8]
    with pytest.raises(DimensionMismatch):
        GridFunctionPair(grid, np.zeros(9), np.zeros(8))
    with pytest.raises(DimensionMismatch):
        GridFunctionPair.from_vector(grid, np.zeros(17))
    with pytest.raises(DimensionMismatch):
        GridFunctionPair.zeros(grid) + GridFunctionPair.zeros(grids[16])
    nonfinite = GridFunctionPair(grid, np.full(9, np.nan), np.zeros(9))
    assert not nonfinite.is_finite()
