# -*- coding: utf-8 -*-
"""
The linearization ``L_alpha`` around the self-similar family, collocated on a
:class:`~blowuplab.grid.CollocationGrid`, together with the Sobolev-type inner
products it is dissipative for, the discrete spectrum and the projection onto
the symmetry modes.
"""
from collections import namedtuple
import math
import warnings

import numpy as np
import pandas as pd
from numpy.polynomial import Chebyshev
from scipy import integrate, linalg
from scipy.special import comb

from . import config
from .categories import ModeClass
from .grid import GridFunctionPair
from .logger import logger
from .utils import DimensionMismatch, EigFailure, ParameterError, QuadratureFailure, UnderResolved

SymmetryModes = namedtuple('SymmetryModes', 'f0 f1 g0')
ObstructionReport = namedtuple('ObstructionReport', 'c_log residual g_residual taylor')

_CLUSTER_RADIUS = 1e-3
_STABLE_EDGE = -0.9


def _check_alpha(alpha):
    if not alpha > 0:
        raise ParameterError('alpha must be > 0, got {}'.format(alpha))
    return math.sqrt(1. + alpha)


def check_pair(grid, q):
    if not isinstance(q, GridFunctionPair) or q.grid != grid:
        raise DimensionMismatch('state does not live on {}'.format(grid))


def _check_order(grid, k):
    if k < 0:
        raise ParameterError('Sobolev index must be >= 0, got {}'.format(k))
    if k + 1 > grid.max_order:
        raise UnderResolved('k = {} needs derivatives of order {} but N = {} trusts only {}'.format(
            k, k + 1, grid.N, grid.max_order))


def potential_derivative(alpha, y, order=1):
    """ ``d^order U / dy^order`` for ``U' = -alpha / (sqrt(1+alpha) + y)``. """
    s = _check_alpha(alpha)
    if order < 1:
        raise ParameterError('order must be >= 1, got {}'.format(order))
    sign = (-1) ** order
    return sign * alpha * math.factorial(order - 1) / (s + y) ** order


def mode_callables(alpha):
    """ Closed forms of ``f0``, ``f1`` and ``g0 = d f_{alpha, kappa} / d alpha`` as pairs of callables. """
    s = _check_alpha(alpha)

    def f0(y):
        return np.ones_like(y), np.zeros_like(y)

    def f1(y):
        return alpha * s / (s + y), alpha * (1 + alpha) / (s + y) ** 2

    def g0(y):
        first = -np.log(s + y) - alpha / (2 * s * (s + y))
        second = 1 - y / (s + y) + alpha * y / (2 * s * (s + y) ** 2)
        return first, second

    return {'f0': f0, 'f1': f1, 'g0': g0}


def symmetry_modes(alpha, grid):
    """ ``f0``, ``f1`` and ``g0`` sampled at the nodes. """
    modes = {}
    for name, func in mode_callables(alpha).items():
        first, second = func(grid.nodes)
        modes[name] = GridFunctionPair(grid, first, second)
    return SymmetryModes(**modes)


def apply_L_alpha(alpha, grid, q):
    """ Collocated ``L_alpha q``; no boundary condition is imposed since the principal
    part degenerates at both ends of the light cone.

    Args:
        alpha (float): Family parameter, > 0
        grid (CollocationGrid): Carrier grid
        q (GridFunctionPair): State

    Raises:
        DimensionMismatch: If ``q`` lives on another grid
    """
    s = _check_alpha(alpha)
    check_pair(grid, q)
    y = grid.nodes
    dq1 = grid.derivative(q.q1, 1)
    first = -y * dq1 + q.q2
    second = grid.derivative(q.q1, 2) - 2 * alpha / (s + y) * dq1 - q.q2 - y * grid.derivative(q.q2, 1)
    return GridFunctionPair(grid, first, second)


def apply_free_modified(grid, q):
    """ The free wave operator with the ``q1(-1)`` boundary subtraction. """
    check_pair(grid, q)
    y = grid.nodes
    first = -y * grid.derivative(q.q1, 1) + q.q2 - q.q1[-1]
    second = grid.derivative(q.q1, 2) - q.q2 - y * grid.derivative(q.q2, 1)
    return GridFunctionPair(grid, first, second)


def assemble_matrix(alpha, grid):
    """ Dense nodal matrix of :func:`apply_L_alpha`, acting on ``concat(q1, q2)``. """
    s = _check_alpha(alpha)
    y = grid.nodes
    d1 = grid.derivative_matrix(1)
    d2 = grid.derivative_matrix(2)
    eye = np.eye(grid.size)
    transport = y[:, None] * d1
    return np.block([[-transport, eye],
                     [d2 - (2 * alpha / (s + y))[:, None] * d1, -eye - transport]])


def _l2(grid, a, b):
    return grid.integrate(a * np.conj(b))


def inner_k(grid, q, r, k):
    """ The sesquilinear form ``<q, r>_k`` with the boundary term ``q1(-1) conj(r1(-1))``.

    Args:
        grid (CollocationGrid): Carrier grid
        q (GridFunctionPair): Left argument
        r (GridFunctionPair): Right argument, conjugated
        k (int): Sobolev index

    Raises:
        UnderResolved: If ``k + 1`` exceeds the trusted derivative order ``N / 2``
    """
    check_pair(grid, q)
    check_pair(grid, r)
    _check_order(grid, k)
    dq1, dr1 = grid.clean_derivative(q.q1, 1), grid.clean_derivative(r.q1, 1)
    value = _l2(grid, dq1, dr1) + _l2(grid, q.q2, r.q2) + q.q1[-1] * np.conj(r.q1[-1])
    if k > 0:
        value += _l2(grid, grid.clean_derivative(q.q1, k + 1), grid.clean_derivative(r.q1, k + 1))
        value += _l2(grid, grid.clean_derivative(q.q2, k), grid.clean_derivative(r.q2, k))
    return complex(value)


def inner_dblk(grid, q, r, k):
    """ ``<<q, r>>_k = <<q1, r1>>_{k+1} + <<q2, r2>>_k`` with ``<<a, b>>_m = (d^m a, d^m b) + (a, b)``. """
    check_pair(grid, q)
    check_pair(grid, r)
    _check_order(grid, k)
    value = _l2(grid, grid.clean_derivative(q.q1, k + 1), grid.clean_derivative(r.q1, k + 1))
    value += _l2(grid, q.q1, r.q1)
    value += _l2(grid, grid.clean_derivative(q.q2, k), grid.clean_derivative(r.q2, k))
    value += _l2(grid, q.q2, r.q2)
    return complex(value)


def norm_k(grid, q, k):
    return math.sqrt(max(inner_k(grid, q, q, k).real, 0.))


def norm_dblk(grid, q, k):
    return math.sqrt(max(inner_dblk(grid, q, q, k).real, 0.))


def sobolev_norm(grid, q, k):
    """ Plain ``H^{k+1} x H^k`` norm, every derivative order included. """
    check_pair(grid, q)
    _check_order(grid, k)
    total = sum(_l2(grid, grid.clean_derivative(q.q1, j), grid.clean_derivative(q.q1, j)).real
                for j in range(k + 2))
    total += sum(_l2(grid, grid.clean_derivative(q.q2, j), grid.clean_derivative(q.q2, j)).real
                 for j in range(k + 1))
    return math.sqrt(max(total, 0.))


def free_dissipativity_check(grid, q, k):
    """ ``Re <L~ q, q>_k + 1/2 |q|_k^2``, nonpositive up to quadrature error for resolved ``q``. """
    _check_order(grid, k + 1)
    value = inner_k(grid, apply_free_modified(grid, q), q, k).real + 0.5 * norm_k(grid, q, k) ** 2
    return float(value)


def commutator_check(alpha, grid, q, k):
    """ Residual of ``d^k L_alpha q = L_{alpha,k} d^k q + L'_{alpha,k} q`` in discrete ``L^2``.

    ``L_{alpha,k}`` carries the shifted damping ``-k`` and ``-1-k`` on the diagonal, the remainder
    ``L'_{alpha,k}`` is ``(0, 2 sum_{j<k} C(k,j) d^{k-j+1}U d^{j+1} q1)``.
    """
    _check_alpha(alpha)
    check_pair(grid, q)
    _check_order(grid, k + 1)
    y = grid.nodes
    d = grid.clean_derivative
    u1 = potential_derivative(alpha, y, 1)

    lq1 = -y * d(q.q1, 1) + q.q2
    lq2 = d(q.q1, 2) + 2 * u1 * d(q.q1, 1) - q.q2 - y * d(q.q2, 1)
    lhs1 = d(lq1, k)
    lhs2 = d(lq2, k)

    p1 = d(q.q1, k)
    p2 = d(q.q2, k)
    rhs1 = -k * p1 - y * d(q.q1, k + 1) + p2
    rhs2 = d(q.q1, k + 2) + 2 * u1 * d(q.q1, k + 1) - (1 + k) * p2 - y * d(q.q2, k + 1)
    for j in range(k):
        rhs2 = rhs2 + 2 * comb(k, j, exact=True) * potential_derivative(alpha, y, k - j + 1) * d(q.q1, j + 1)

    diff = np.abs(lhs1 - rhs1) ** 2 + np.abs(lhs2 - rhs2) ** 2
    return float(math.sqrt(grid.integrate(diff)))


def solve_free_modified(grid, f):
    """ Explicit solution of ``-L~ q = f``.

    Eliminating ``q2 = y q1' + q1(-1) - f1`` leaves ``((y^2-1) q1')' = F - q1(-1)`` with
    ``F = f1 + y f1' + f2``; regularity at ``y = 1`` fixes ``q1(-1) = 1/2 int F``.
    """
    check_pair(grid, f)
    y = grid.nodes
    big_f = f.q1 + y * grid.derivative(f.q1, 1) + f.q2
    series = Chebyshev(grid.coefficients(big_f))
    c = 0.5 * series.integ(lbnd=-1)(1.)
    g = (series - c).integ(lbnd=-1)

    dq1 = np.empty(grid.size, dtype=complex)
    interior = slice(1, grid.N)
    dq1[interior] = g(y[interior]) / (y[interior] ** 2 - 1)
    # endpoint limits by l'Hopital
    dq1[0] = (big_f[0] - c) / 2.
    dq1[-1] = -(big_f[-1] - c) / 2.

    q1 = c + Chebyshev(grid.coefficients(dq1)).integ(lbnd=-1)(y)
    q2 = y * dq1 + c - f.q1
    return GridFunctionPair(grid, q1, q2)


def _pair_tail_energy(grid, q):
    energies = []
    for values in (q.q1, q.q2):
        energies.append(np.abs(grid.coefficients(values)) ** 2)
    energy = energies[0] + energies[1]
    total = energy.sum()
    if total == 0:
        return 0.
    start = int(math.floor(0.75 * grid.size))
    return float(energy[start:].sum() / total)


def _cosine_distance(grid, q, r):
    cos = abs(inner_dblk(grid, q, r, 0)) / (norm_dblk(grid, q, 0) * norm_dblk(grid, r, 0))
    return max(0., 1. - cos)


class SpectralReport(object):
    """ Discrete spectrum of ``L_alpha`` with residuals and a classification per eigenvalue.

    Residuals are ``|(L - lambda) v| / |v|`` measured in ``<<., .>>_k`` with ``k = k_norm``.
    Above ``k = 0`` the roundoff of the discrete eigenpair dominates them at large ``N``.
    """

    def __init__(self, alpha, N, k_norm, eigenvalues, residuals, classification, resolved,
                 mode_one_distance=None):
        self.alpha = alpha
        self.N = N
        self.k_norm = k_norm
        self.eigenvalues = np.asarray(eigenvalues)
        self.residuals = np.asarray(residuals)
        self.classification = list(classification)
        self.resolved = np.asarray(resolved, dtype=bool)
        self.mode_one_distance = mode_one_distance

    def count(self, mode_class):
        return sum(1 for c in self.classification if c == mode_class)

    def unstable_multiset(self):
        """ Classes of the resolved eigenvalues with ``Re > -0.9``, sorted. """
        return sorted(c.value for c, lam, ok in zip(self.classification, self.eigenvalues, self.resolved)
                      if ok and lam.real > _STABLE_EDGE)

    def max_resolved_residual(self):
        if not self.resolved.any():
            return 0.
        return float(np.max(self.residuals[self.resolved]))

    def to_frame(self):
        return pd.DataFrame({'re': self.eigenvalues.real,
                             'im': self.eigenvalues.imag,
                             'residual': self.residuals,
                             'class': [c.value for c in self.classification],
                             'resolved': self.resolved})

    def to_json_dict(self):
        return {'alpha': self.alpha,
                'N': self.N,
                'k_norm': self.k_norm,
                'mode_one_distance': self.mode_one_distance,
                'eigenvalues': [{'re': lam.real, 'im': lam.imag, 'residual': res, 'class': c.value}
                                for lam, res, c in zip(self.eigenvalues, self.residuals, self.classification)]}

    def __repr__(self):
        return 'SpectralReport(alpha={}, N={}, unstable={})'.format(self.alpha, self.N, self.unstable_multiset())


def _classify(eigenvalues, resolved):
    classes = []
    for lam, ok in zip(eigenvalues, resolved):
        if not ok:
            classes.append(ModeClass.unresolved)
            continue
        target = None
        for candidate, mode_class in ((0., ModeClass.mode_zero), (1., ModeClass.mode_one)):
            if abs(lam - candidate) < _CLUSTER_RADIUS:
                # a defective eigenvalue splits like sqrt(roundoff), the cluster mean does not
                cluster = [mu for mu, other in zip(eigenvalues, resolved)
                           if other and abs(mu - candidate) < _CLUSTER_RADIUS]
                if abs(np.mean(cluster) - candidate) < config.mode_tol:
                    target = mode_class
        if target is not None:
            classes.append(target)
        elif lam.real <= -1 + 0.1:
            classes.append(ModeClass.stable_halfplane)
        else:
            logger.warning('resolved eigenvalue {} outside the predicted spectrum'.format(lam))
            classes.append(ModeClass.unresolved)
    return classes


def assemble_and_eig(alpha, grid, k_norm=None):
    """ Full nonsymmetric eigen-decomposition of the collocated ``L_alpha``.

    Args:
        alpha (float): Family parameter, > 0
        grid (CollocationGrid): Carrier grid, ``N <= 256``
        k_norm (int, optional): Sobolev index of the residual norm
            (default: ``config.k_norm``)

    Returns:
        SpectralReport

    Raises:
        EigFailure: If the QR iteration does not converge
    """
    k_norm = config.k_norm if k_norm is None else k_norm
    _check_order(grid, k_norm)
    if grid.N > 256:
        raise ParameterError('dense eigen-decomposition is limited to N <= 256, got {}'.format(grid.N))
    matrix = assemble_matrix(alpha, grid)
    try:
        eigenvalues, vectors = linalg.eig(matrix)
    except linalg.LinAlgError as e:
        msg = 'eigen-decomposition failed for alpha = {}, N = {}: {}'.format(alpha, grid.N, e)
        logger.error(msg)
        raise EigFailure(msg)

    residuals, resolved = [], []
    for lam, vector in zip(eigenvalues, vectors.T):
        v = GridFunctionPair.from_vector(grid, vector)
        defect = GridFunctionPair.from_vector(grid, matrix.dot(vector) - lam * vector)
        residuals.append(norm_dblk(grid, defect, k_norm) / norm_dblk(grid, v, k_norm))
        resolved.append(_pair_tail_energy(grid, v) < config.resolved_tail)
    classification = _classify(eigenvalues, resolved)

    mode_one_distance = None
    ones = [i for i, c in enumerate(classification) if c == ModeClass.mode_one]
    if ones:
        v = GridFunctionPair.from_vector(grid, vectors[:, ones[0]])
        mode_one_distance = _cosine_distance(grid, v, symmetry_modes(alpha, grid).f1)

    order = np.lexsort((eigenvalues.imag, -eigenvalues.real))
    report = SpectralReport(alpha, grid.N, k_norm, eigenvalues[order], np.asarray(residuals)[order],
                            [classification[i] for i in order], np.asarray(resolved)[order],
                            mode_one_distance)
    logger.info('[Spectrum OK] alpha = {}, N = {}: unstable {}'.format(alpha, grid.N, report.unstable_multiset()))
    return report


def spectral_report_json(report):
    return report.to_json_dict()


def jordan_block_check(alpha, grid):
    """ ``max(|L g0 - f0|, |L^2 g0|)`` in ``<<., .>>_0``.

    The second application acts on the chopped Chebyshev series of ``L g0`` so that the
    roundoff plateau of the first one is not differentiated twice more.
    """
    _check_alpha(alpha)
    modes = symmetry_modes(alpha, grid)
    lg0 = apply_L_alpha(alpha, grid, modes.g0)
    smooth = GridFunctionPair(grid, grid.evaluate(grid.chopped_coefficients(lg0.q1)),
                              grid.evaluate(grid.chopped_coefficients(lg0.q2)))
    first = norm_dblk(grid, lg0 - modes.f0, 0)
    second = norm_dblk(grid, apply_L_alpha(alpha, grid, smooth), 0)
    return max(first, second)


class SpectralProjector(object):
    """ Projection onto ``span{g0, f0, f1}`` along the stable invariant subspace of the
    collocated operator, read from an ordered complex Schur form.

    Args:
        alpha (float): Family parameter, > 0
        grid (CollocationGrid): Carrier grid
    """

    names = ('g0', 'f0', 'f1')

    def __init__(self, alpha, grid):
        _check_alpha(alpha)
        self.alpha = alpha
        self.grid = grid
        matrix = assemble_matrix(alpha, grid)
        try:
            _, z, sdim = linalg.schur(matrix, output='complex', sort=lambda x: x.real < -0.5)
        except linalg.LinAlgError as e:
            msg = 'Schur decomposition failed for alpha = {}, N = {}: {}'.format(alpha, grid.N, e)
            logger.error(msg)
            raise EigFailure(msg)
        expected = matrix.shape[0] - 3
        if sdim != expected:
            msg = 'stable subspace has dimension {} instead of {} (alpha = {}, N = {})'.format(
                sdim, expected, alpha, grid.N)
            logger.error(msg)
            raise EigFailure(msg)
        modes = symmetry_modes(alpha, grid)
        self.basis = [getattr(modes, name) for name in self.names]
        columns = np.column_stack([b.to_vector() for b in self.basis] + [z[:, :sdim]])
        self._lu = linalg.lu_factor(columns)

    def coefficients(self, q):
        """ Coordinates of ``q`` along ``(g0, f0, f1)``. """
        check_pair(self.grid, q)
        return linalg.lu_solve(self._lu, q.to_vector())[:3]

    def project(self, q):
        c = self.coefficients(q)
        result = GridFunctionPair.zeros(self.grid)
        for coeff, b in zip(c, self.basis):
            result = result + coeff * b
        return result

    def stable_part(self, q):
        return q - self.project(q)


def coercivity_spot_check(alpha, grid, k, samples=20, seed=0):
    """ Sampled ``Re <<L_alpha q, q>>_k / |q|_k^2`` on random stable states; informational only. """
    from .evolve import random_perturbation
    projector = SpectralProjector(alpha, grid)
    ratios = []
    for i in range(samples):
        q = projector.stable_part(GridFunctionPair.from_callables(grid, *random_perturbation(1., seed + i)))
        lq = apply_L_alpha(alpha, grid, q)
        ratios.append(inner_dblk(grid, lq, q, k).real / norm_dblk(grid, q, k) ** 2)
    return pd.DataFrame({'sample': np.arange(samples), 'ratio': ratios})


def obstruction_source(y):
    """ Right-hand side left after eliminating ``v2`` from ``L_3 v = g0``. """
    return np.log(2 + y) + (y * y - 0.75 * y - 2.5) / (2 + y) ** 2


def _obstruction_kernel(z):
    return (1 - z) * ((2 + z) ** 2 * np.log(2 + z) + z * z - 0.75 * z - 2.5)


def _weighted_primitive(t, quad_tol):
    """ ``t^2 int_{t-1}^{1} G(z) / (1+z)^3 dz``, integrated in ``u = log(1+z)``. """
    with warnings.catch_warnings():
        warnings.simplefilter('error', integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(lambda u: _obstruction_kernel(math.expm1(u)) * math.exp(-2 * u),
                                      math.log(t), math.log(2.), epsabs=0., epsrel=quad_tol,
                                      limit=config.quad_limit)
        except integrate.IntegrationWarning as e:
            msg = 'obstruction quadrature failed at 1+y = {:.3e}: {}'.format(t, e)
            logger.error(msg)
            raise QuadratureFailure(msg)
    return t * t * value


def _fit_log_coefficient(window, quad_tol, points=60):
    t = np.logspace(-6, math.log10(window), points)
    values = np.array([_weighted_primitive(v, quad_tol) for v in t])
    design = np.column_stack([np.ones_like(t), t, t * t, t * t * np.log(t)])
    coeffs, _, _, _ = np.linalg.lstsq(design, values, rcond=None)
    residual = float(np.sqrt(np.mean((design.dot(coeffs) - values) ** 2)))
    return coeffs[3], residual


def kernel_taylor_coefficients(order=3, radius=0.5, points=64):
    """ Taylor coefficients of ``G`` at ``z = -1`` from a Cauchy integral on a circle. """
    theta = 2 * math.pi * np.arange(points) / points
    samples = _obstruction_kernel(-1 + radius * np.exp(1j * theta))
    coeffs = np.fft.fft(samples) / points
    return np.real(coeffs[:order]) / radius ** np.arange(order)


def generalized_mode_obstruction(grid, window=0.05, quad_tol=1e-11):
    """ Coefficient of ``(1+y)^2 log(1+y)`` in the would-be generalized eigenfunction of ``L_3``
    above ``g0``; a nonzero value rules out a Jordan chain of length three.

    Args:
        grid (CollocationGrid): Grid on which the source term is also rebuilt from ``g0``
        window (float, optional): Width of the fit window in ``1+y`` (default: ``0.05``)
        quad_tol (float, optional): Relative quadrature tolerance

    Returns:
        ObstructionReport: Richardson-extrapolated ``c_log``, the fit residual, the
        discrepancy between the collocated and closed-form source, and the Taylor coefficients
    """
    c_full, residual = _fit_log_coefficient(window, quad_tol)
    c_half, residual_half = _fit_log_coefficient(window / 2, quad_tol)
    c_log = 2 * c_half - c_full

    g0 = symmetry_modes(3., grid).g0
    y = grid.nodes
    source = -g0.q1 - y * grid.derivative(g0.q1, 1) - g0.q2
    g_residual = float(np.max(np.abs(source - obstruction_source(y))))
    logger.info('[Obstruction] c_log = {:.6f} (windows {:.6f}, {:.6f})'.format(c_log, c_full, c_half))
    return ObstructionReport(float(c_log), max(residual, residual_half), g_residual, kernel_taylor_coefficients())
