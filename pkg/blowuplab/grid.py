# -*- coding: utf-8 -*-
"""
Chebyshev-Gauss-Lobatto collocation on ``[-1, 1]``.

Nodes are ``x_j = cos(pi j / N)``, ``j = 0..N``, stored in decreasing order so that
index ``0`` is ``y = 1`` and index ``N`` is ``y = -1``.
"""
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial import chebyshev
from scipy import fft
from scipy.linalg import toeplitz

from . import config
from .utils import DimensionMismatch, ParameterError, UnderResolved


@lru_cache(maxsize=32)
def _differentiation_matrices(n_points, order):
    """ Derivative matrices of orders ``1..order`` on ``n_points`` Chebyshev points,
    with the trigonometric-difference and flipping refinements for accuracy. """
    n1 = n_points // 2
    n2 = n_points - n1
    k = np.arange(n_points).reshape(n_points, 1)
    th = k * math.pi / (n_points - 1)

    half = np.tile(th / 2., n_points)
    dx = 2 * np.sin(half.T + half) * np.sin(half.T - half)
    dx[n1:, :] = -np.flipud(np.fliplr(dx[:n2, :]))
    np.fill_diagonal(dx, 1.)
    z = 1. / dx
    np.fill_diagonal(z, 0.)

    c = toeplitz((-1.) ** np.arange(n_points))
    c[0, :] *= 2
    c[-1, :] *= 2
    c[:, 0] /= 2
    c[:, -1] /= 2

    matrices = []
    d = np.eye(n_points)
    for ell in range(order):
        d = (ell + 1) * z * (c * np.tile(np.diag(d).reshape(n_points, 1), n_points) - d)
        np.fill_diagonal(d, -np.sum(d, axis=1))
        matrices.append(d)
    return tuple(matrices)


def clenshaw_curtis_weights(N):
    """ Clenshaw-Curtis weights for the nodes ``cos(pi j / N)``. """
    theta = math.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    inner = np.arange(1, N)
    v = np.ones(N - 1)
    if N % 2 == 0:
        w[0] = w[N] = 1. / (N * N - 1)
        for k in range(1, N // 2):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(N * theta[inner]) / (N * N - 1)
    else:
        w[0] = w[N] = 1. / (N * N)
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2 * v / N
    return w


class CollocationGrid(object):
    """ Collocation grid with derivative matrices and matched quadrature.

    Args:
        N (int): Polynomial degree, the grid has ``N + 1`` nodes
    """

    def __init__(self, N=None):
        N = config.grid_N if N is None else int(N)
        if N < 4:
            raise ParameterError('collocation degree must be >= 4, got {}'.format(N))
        self.N = N
        self.nodes = np.cos(math.pi * np.arange(N + 1) / N)
        # exact symmetry and endpoints
        self.nodes[N // 2] = 0. if N % 2 == 0 else self.nodes[N // 2]
        self.nodes[0], self.nodes[N] = 1., -1.
        self.quad_weights = clenshaw_curtis_weights(N)

    @property
    def size(self):
        return self.N + 1

    @property
    def max_order(self):
        """ Highest derivative order trusted on this grid. """
        return self.N // 2

    @property
    def diff_matrix(self):
        return self.derivative_matrix(1)

    def derivative_matrix(self, m):
        """ Collocation matrix of ``d^m / dy^m``. """
        if m == 0:
            return np.eye(self.size)
        if m > self.max_order:
            raise UnderResolved('derivative order {} exceeds the trusted order {} at N = {}'.format(
                m, self.max_order, self.N))
        return _differentiation_matrices(self.size, max(m, 2))[m - 1]

    def derivative(self, values, m=1):
        return self.derivative_matrix(m).dot(values)

    def integrate(self, values):
        return self.quad_weights.dot(values)

    def coefficients(self, values):
        """ Chebyshev coefficients of the interpolant of nodal ``values``. """
        values = np.asarray(values)
        if np.iscomplexobj(values):
            return self.coefficients(values.real) + 1j * self.coefficients(values.imag)
        c = fft.dct(values, type=1) / self.N
        c[0] /= 2
        c[-1] /= 2
        return c

    def evaluate(self, coeffs, points=None):
        return chebyshev.chebval(self.nodes if points is None else points, coeffs)

    def chopped_coefficients(self, values, tol=1e-13):
        """ Coefficients with the roundoff plateau beyond the last significant one removed. """
        c = self.coefficients(values)
        scale = np.max(np.abs(c))
        if scale == 0:
            return c
        significant = np.flatnonzero(np.abs(c) > tol * scale)
        c[significant[-1] + 1:] = 0.
        return c

    def clean_derivative(self, values, m):
        """ ``d^m/dy^m`` at the nodes, from the chopped Chebyshev series. Used in norms, where
        high derivatives of the roundoff plateau would dominate otherwise. """
        if m > self.max_order:
            raise UnderResolved('derivative order {} exceeds the trusted order {} at N = {}'.format(
                m, self.max_order, self.N))
        c = self.chopped_coefficients(values)
        if m == 0:
            return self.evaluate(c)
        return self.evaluate(chebyshev.chebder(c, m))

    def tail_energy(self, values, fraction=0.25):
        """ Share of the coefficient energy carried by the top ``fraction`` of the modes. """
        energy = np.abs(self.coefficients(values)) ** 2
        total = energy.sum()
        if total == 0:
            return 0.
        start = int(math.floor((1 - fraction) * self.size))
        return float(energy[start:].sum() / total)

    def resolved(self, values, threshold=None):
        threshold = config.resolved_tail if threshold is None else threshold
        return self.tail_energy(values) < threshold

    def interpolate(self, values, points):
        return self.evaluate(self.coefficients(values), points)

    def __eq__(self, other):
        return isinstance(other, CollocationGrid) and other.N == self.N

    def __hash__(self):
        return hash(self.N)

    def __repr__(self):
        return 'CollocationGrid(N={})'.format(self.N)


class GridFunctionPair(object):
    """ A state ``q = (q1, q2)`` sampled at the nodes of a grid.

    Args:
        grid (CollocationGrid): Carrier grid
        q1 (array-like): Nodal values of the first component
        q2 (array-like): Nodal values of the second component
    """

    def __init__(self, grid, q1, q2):
        q1 = np.asarray(q1, dtype=complex).copy()
        q2 = np.asarray(q2, dtype=complex).copy()
        if q1.shape != (grid.size,) or q2.shape != (grid.size,):
            raise DimensionMismatch('components of shape {} and {} do not match a grid of {} nodes'.format(
                q1.shape, q2.shape, grid.size))
        self.grid = grid
        self.q1 = q1
        self.q2 = q2

    @classmethod
    def from_callables(cls, grid, f1, f2):
        y = grid.nodes
        return cls(grid, np.broadcast_to(f1(y), y.shape), np.broadcast_to(f2(y), y.shape))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.size), np.zeros(grid.size))

    @classmethod
    def from_vector(cls, grid, vector):
        vector = np.asarray(vector)
        if vector.shape != (2 * grid.size,):
            raise DimensionMismatch('vector of shape {} does not match a grid of {} nodes'.format(
                vector.shape, grid.size))
        return cls(grid, vector[:grid.size], vector[grid.size:])

    def to_vector(self):
        return np.concatenate([self.q1, self.q2])

    def check_compatible(self, other):
        if not isinstance(other, GridFunctionPair) or other.grid != self.grid:
            raise DimensionMismatch('pairs live on different grids: {} and {}'.format(
                self.grid, getattr(other, 'grid', None)))

    @property
    def real(self):
        return GridFunctionPair(self.grid, self.q1.real, self.q2.real)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.q1)) and np.all(np.isfinite(self.q2)))

    def __add__(self, other):
        self.check_compatible(other)
        return GridFunctionPair(self.grid, self.q1 + other.q1, self.q2 + other.q2)

    def __sub__(self, other):
        self.check_compatible(other)
        return GridFunctionPair(self.grid, self.q1 - other.q1, self.q2 - other.q2)

    def __mul__(self, scalar):
        return GridFunctionPair(self.grid, scalar * self.q1, scalar * self.q2)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return GridFunctionPair(self.grid, self.q1 / scalar, self.q2 / scalar)

    def __neg__(self):
        return GridFunctionPair(self.grid, -self.q1, -self.q2)

    def __repr__(self):
        return 'GridFunctionPair(N={}, max|q1|={:.3e}, max|q2|={:.3e})'.format(
            self.grid.N, np.max(np.abs(self.q1)), np.max(np.abs(self.q2)))
