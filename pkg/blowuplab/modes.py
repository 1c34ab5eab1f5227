# -*- coding: utf-8 -*-
"""
Eigenvalue problem of the linearization around ``U~_{alpha,inf,kappa}``.

In the similarity coordinate ``y`` the eigen-equation is of Heun type with
singular points ``-1, 1, -sqrt(1+alpha)`` and infinity. The Lorentz boost with
``gamma = 1/sqrt(1+alpha)`` maps it onto the hypergeometric equation

``z'(1-z') psi'' + ((lambda - sqrt(1+alpha)) - 2 lambda z') psi' - lambda(lambda-1) psi = 0``

with ``y' = 2z' - 1``, on which smoothness reduces to the termination of an explicit
coefficient sequence.
"""
from __future__ import print_function
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import math

import numpy as np
import pandas as pd

from . import config
from .categories import Evidence, SingularPoint, ExponentChoice
from .logger import logger, scan_logger
from .specfun import coefficient_ratios, gauss_2f1, nonpositive_integer
from .utils import NumericalFailure, ParameterError, OutOfHalfPlane, NoConvergence, DomainError, \
    as_complex, nearest_integer


class LogCase(NumericalFailure):
    """ The requested Frobenius branch carries a logarithmic term. """
    pass


class ResonantDivision(NumericalFailure):
    """ A recurrence denominator is too close to zero to divide by safely. """
    pass


HeunCoefficients = namedtuple('HeunCoefficients', 'gamma delta d a b c epsilon')
IndicialData = namedtuple('IndicialData', 'singular_point roots integer_gap log_possible')
FrobeniusSeries = namedtuple('FrobeniusSeries', 'exponent coeffs center radius_estimate')
ModeVerdict = namedtuple('ModeVerdict', 'lam smooth evidence ratio_tail')

# integer gaps closer than this are exact resonances, closer than the snap tolerance are ill-conditioned
_EXACT_GAP = 1e-12


class EigenProblem(object):
    """ The pair ``(alpha, lambda)`` of the eigen-equation.

    Args:
        alpha (float): Family parameter, must be > 0
        lam (complex): Candidate eigenvalue
    """

    def __init__(self, alpha, lam):
        if not alpha > 0:
            raise ParameterError('alpha must be > 0, got {}'.format(alpha))
        self.alpha = float(alpha)
        self.lam = as_complex(lam, 'lambda')

    @property
    def root(self):
        return math.sqrt(1 + self.alpha)

    @property
    def boost(self):
        """ Lorentz boost velocity ``1/sqrt(1+alpha)`` """
        return 1. / self.root

    def hypergeometric_parameters(self):
        """ ``(a, b, c) = (lambda, lambda - 1, lambda - sqrt(1+alpha))`` in the ``z'`` chart. """
        return self.lam, self.lam - 1, self.lam - self.root

    def __repr__(self):
        return 'EigenProblem(alpha={}, lambda={})'.format(self.alpha, self.lam)


def heun_coefficients(problem):
    """ Parameters of the Heun form of the eigen-equation in ``z = (y+1)/2``. """
    lam, s = problem.lam, problem.root
    return HeunCoefficients(gamma=lam - s,
                            delta=lam + s,
                            d=-(s - 1) / 2.,
                            a=lam,
                            b=lam + 1,
                            c=-0.5 * (lam * lam + lam) * (s - 1),
                            epsilon=2.)


def _stencil(f, x, h):
    # five-point centered differences, fourth order
    fm2, fm1, f0, fp1, fp2 = (f(x + j * h) for j in (-2, -1, 0, 1, 2))
    first = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    second = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return f0, first, second


def eigen_residual(problem, phi, y, h=1e-3):
    """ ``|(lambda^2+lambda) phi + ((2 lambda+2) y + 2 alpha/(sqrt(1+alpha)+y)) phi' + (y^2-1) phi''|``
    with fourth-order finite differences of width ``h``. """
    if abs(y) > 1 - 2 * h:
        raise DomainError('residual stencil needs |y| <= 1 - 2h, got y = {}'.format(y))
    lam, s, alpha = problem.lam, problem.root, problem.alpha
    f0, f1, f2 = _stencil(phi, y, h)
    return abs((lam * lam + lam) * f0 + ((2 * lam + 2) * y + 2 * alpha / (s + y)) * f1 + (y * y - 1) * f2)


def transformed_residual(problem, psi, yprime, h=1e-3):
    """ ``|(lambda^2-lambda) psi + (2 lambda y' + 2 sqrt(1+alpha)) psi' + (y'^2-1) psi''|``. """
    if abs(yprime) > 1 - 2 * h:
        raise DomainError('residual stencil needs |y\'| <= 1 - 2h, got y\' = {}'.format(yprime))
    lam, s = problem.lam, problem.root
    f0, f1, f2 = _stencil(psi, yprime, h)
    return abs((lam * lam - lam) * f0 + (2 * lam * yprime + 2 * s) * f1 + (yprime * yprime - 1) * f2)


def _boost(lam, gamma, func, x):
    prefactor = (1 - gamma * x) / math.sqrt(1 - gamma * gamma)
    # prefactor > 0 on [-1, 1], the principal power crosses no branch cut
    return prefactor ** (-lam) * func((x - gamma) / (1 - gamma * x))


def lorentz_transform_eigenfunction(problem, phi, yprime):
    """ ``psi(y') = ((1 - gamma y')/sqrt(1 - gamma^2))^(-lambda) phi((y' - gamma)/(1 - gamma y'))``.

    Args:
        problem (EigenProblem): Eigenvalue and family parameter
        phi (callable): Eigenfunction candidate in the ``y`` chart
        yprime (float): Point of ``[-1, 1]`` in the boosted chart

    Returns:
        complex: ``psi(y')``
    """
    if abs(yprime) > 1:
        raise DomainError('boosted coordinate must satisfy |y\'| <= 1, got {}'.format(yprime))
    return complex(_boost(problem.lam, problem.boost, phi, yprime))


def inverse_lorentz_transform(problem, psi, y):
    """ Back to the ``y`` chart: the same map with the boost reversed. """
    if abs(y) > 1:
        raise DomainError('similarity coordinate must satisfy |y| <= 1, got {}'.format(y))
    return complex(_boost(problem.lam, -problem.boost, psi, y))


def boosted(problem, phi):
    """ ``psi`` as a callable of ``y'``. """
    return lambda yprime: _boost(problem.lam, problem.boost, phi, yprime)


def unboosted(problem, psi):
    """ ``phi`` as a callable of ``y``. """
    return lambda y: _boost(problem.lam, -problem.boost, psi, y)


def mode_eigenfunction(alpha, lam):
    """ First components of the explicit symmetry eigenfunctions: ``1`` for ``lambda = 0``
    and ``alpha sqrt(1+alpha)/(sqrt(1+alpha) + y)`` for ``lambda = 1``. """
    s = math.sqrt(1 + alpha)
    m = nearest_integer(as_complex(lam, 'lambda'), config.snap_tol)
    if m == 0:
        return lambda y: np.ones_like(np.asarray(y, dtype=float))[()]
    if m == 1:
        return lambda y: alpha * s / (s + y)
    raise ParameterError('explicit eigenfunctions exist for lambda in {{0, 1}}, got {}'.format(lam))


def local_solution_at_one(problem, tol=None):
    """ Regular local solution ``2F1(a, b; 1+a+b-c; 1-z')`` of the boosted equation,
    as a callable of ``y'`` on ``(-1, 1]``. """
    a, b, c = problem.hypergeometric_parameters()

    def psi(yprime):
        return gauss_2f1(a, b, 1 + a + b - c, (1 - yprime) / 2., tol=tol).value
    return psi


def indicial_roots(problem, point):
    """ Indicial roots of the hypergeometric form at ``z' = 0`` or ``z' = 1``.

    At ``z' = 0`` the polynomial is ``s(s - 1 + c)`` with roots ``{0, 1 + sqrt(1+alpha) - lambda}``,
    at ``z' = 1`` it is ``s(s + a + b - c)`` with roots ``{0, 1 - sqrt(1+alpha) - lambda}``.
    Roots are returned ``(s_plus, s_minus)`` with ``Re s_plus >= Re s_minus``.
    """
    point = SingularPoint(point)
    a, b, c = problem.hypergeometric_parameters()
    other = 1 - c if point == SingularPoint.zero else c - a - b
    roots = sorted([0j, complex(other)], key=lambda r: r.real, reverse=True)
    gap = roots[0] - roots[1]
    m = nearest_integer(gap, _EXACT_GAP)
    integer_gap = m is not None and m >= 0
    return IndicialData(point, tuple(roots), integer_gap, integer_gap)


def _indicial_polynomial(problem, center):
    a, b, c = problem.hypergeometric_parameters()
    c_local = c if center == SingularPoint.zero else a + b + 1 - c
    return (lambda t: t * (t - 1 + c_local)), a, b


def frobenius_series(problem, center, exponent_choice, n_terms):
    """ Frobenius series ``(x)^s sum_k a_k x^k`` around a singular point of the boosted
    equation, with ``x = z'`` at ``zero`` and ``x = 1 - z'`` at ``one``.

    Coefficients follow the two-term recurrence
    ``P(s+k+1) a_{k+1} = (s+k+a)(s+k+b) a_k`` with ``a_0 = 1``.

    Raises:
        LogCase: If the requested branch needs a logarithmic term
        ResonantDivision: If a denominator sits within the snap tolerance of zero
            without being an exact resonance
    """
    center = SingularPoint(center)
    exponent_choice = ExponentChoice(exponent_choice)
    if n_terms < 2:
        raise ParameterError('need at least 2 terms, got {}'.format(n_terms))

    data = indicial_roots(problem, center)
    s_plus, s_minus = data.roots
    exponent = s_plus if exponent_choice == ExponentChoice.plus else s_minus
    gap = s_plus - s_minus
    resonance = None
    if exponent_choice == ExponentChoice.minus:
        if abs(gap) < _EXACT_GAP:
            raise LogCase('double indicial root {} at {}: the second solution carries a log term'.format(
                s_plus, center.value))
        if data.integer_gap:
            resonance = nearest_integer(gap, _EXACT_GAP)
        elif nearest_integer(gap, config.snap_tol) is not None:
            raise ResonantDivision('indicial gap {} is within {} of an integer'.format(gap, config.snap_tol))

    poly, a, b = _indicial_polynomial(problem, center)
    coeffs = np.zeros(n_terms, dtype=complex)
    coeffs[0] = 1.
    for k in range(n_terms - 1):
        numerator = (exponent + k + a) * (exponent + k + b) * coeffs[k]
        if resonance is not None and k + 1 == resonance:
            if abs(numerator) > _EXACT_GAP * max(1., abs(coeffs[k])):
                raise LogCase('resonance at order {} with nonzero numerator at {}: log term required'.format(
                    resonance, center.value))
            coeffs[k + 1] = 0.
            continue
        denominator = poly(exponent + k + 1)
        if abs(denominator) < config.snap_tol:
            raise ResonantDivision('recurrence denominator {} at order {}'.format(denominator, k + 1))
        coeffs[k + 1] = numerator / denominator

    last = np.flatnonzero(coeffs)[-1]
    # trailing zeros stay zero: the series is a polynomial
    radius = math.inf if last < n_terms - 1 else abs(coeffs[-2]) / abs(coeffs[-1])
    return FrobeniusSeries(exponent, coeffs, center, radius)


def frobenius_recurrence_residual(problem, series):
    """ Largest relative residual of the recurrence over the generated coefficients. """
    poly, a, b = _indicial_polynomial(problem, SingularPoint(series.center))
    s, coeffs = series.exponent, series.coeffs
    worst = 0.
    for k in range(len(coeffs) - 1):
        lhs = poly(s + k + 1) * coeffs[k + 1]
        rhs = (s + k + a) * (s + k + b) * coeffs[k]
        scale = max(abs(lhs), abs(rhs))
        if scale > 0:
            worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def _check_n_max(n_max):
    n_max = config.n_max if n_max is None else int(n_max)
    if n_max < 100:
        raise ParameterError('the ratio test needs n_max >= 100, got {}'.format(n_max))
    return n_max


def mode_stability_verdict(alpha, lam, n_max=None):
    """ Decide whether ``lambda`` admits a smooth eigenfunction.

    The boosted local solution at ``z' = 1`` is the series with coefficients
    ``a_n = (lambda)_n (lambda-1)_n / ((lambda + sqrt(1+alpha))_n n!)``; it is smooth on the
    whole interval exactly when the series terminates, otherwise its radius of convergence is one.

    Args:
        alpha (float): Family parameter
        lam (complex): Candidate eigenvalue with ``Re lambda > -1``
        n_max (int, optional): Index at which the ratio is tested (default: ``config.n_max``)

    Returns:
        ModeVerdict: smoothness decision, evidence and ``|r_{n_max} - 1|``

    Raises:
        ParameterError: If ``n_max < 100``
        OutOfHalfPlane: If ``Re lambda <= -1``
    """
    lam = as_complex(lam, 'lambda')
    n_max = _check_n_max(n_max)
    if not alpha > 0:
        raise ParameterError('alpha must be > 0, got {}'.format(alpha))
    if lam.real <= -1:
        raise OutOfHalfPlane('mode stability is decided for Re lambda > -1, got {}'.format(lam))

    snapped = nearest_integer(lam, config.snap_tol)
    if snapped in (0, 1):
        lam = complex(snapped)
    if nonpositive_integer(lam, config.snap_tol) is not None or \
            nonpositive_integer(lam - 1, config.snap_tol) is not None:
        # terminating series, no tail to test
        return ModeVerdict(lam, True, Evidence.series_terminates, 0.)

    ratios = coefficient_ratios(lam, alpha, n_max)
    ratio_tail = float(abs(ratios[-1] - 1))
    if ratio_tail <= config.ratio_tail_threshold:
        return ModeVerdict(lam, False, Evidence.ratio_limit, ratio_tail)

    log_coeff = np.cumsum(np.log(np.abs(ratios)))
    radius = math.exp(-log_coeff[-1] / (n_max + 1))
    if abs(radius - 1) <= config.ratio_tail_threshold:
        return ModeVerdict(lam, False, Evidence.radius_one, ratio_tail)

    msg = 'lambda = {}: ratio tail {:.3e} and root-test radius {:.4f} inconclusive at n_max = {}'.format(
        lam, ratio_tail, radius, n_max)
    logger.error(msg)
    raise NoConvergence(msg)


def _lattice(lo_hi, count):
    lo, hi = lo_hi
    if count < 1:
        raise ParameterError('lattice dimensions must be >= 1, got {}'.format(count))
    return np.linspace(lo, hi, count)


def scan_halfplane(alpha, re_range, im_range, grid, n_max=None, jobs=None):
    """ Mode-stability verdicts on a rectangular lattice of the half plane ``Re lambda > -1``.

    Args:
        alpha (float): Family parameter
        re_range (tuple(float, float)): Real-part interval
        im_range (tuple(float, float)): Imaginary-part interval
        grid (tuple(int, int)): Lattice dimensions along the real and the imaginary axis
        n_max (int, optional): Ratio-test index
        jobs (int, optional): Worker threads (default: ``config.jobs``)

    Returns:
        list(ModeVerdict): verdicts in lattice order, real part major
    """
    if re_range[0] <= -1:
        raise OutOfHalfPlane('scan range must lie in Re lambda > -1, got {}'.format(re_range))
    n_max = _check_n_max(n_max)
    points = [complex(re, im) for re in _lattice(re_range, grid[0]) for im in _lattice(im_range, grid[1])]
    jobs = config.jobs if jobs is None else jobs

    def task(lam):
        verdict = mode_stability_verdict(alpha, lam, n_max)
        scan_logger.debug('[Scan {}] smooth={} evidence={} tail={:.3e}'.format(
            lam, verdict.smooth, verdict.evidence.value, verdict.ratio_tail))
        return verdict

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        verdicts = list(pool.map(task, points))

    logger.info('[Scan OK] alpha={} {} points, {} smooth'.format(
        alpha, len(verdicts), sum(v.smooth for v in verdicts)))
    return verdicts


def scan_to_frame(verdicts):
    """ Scan report with columns re_lambda, im_lambda, smooth, evidence, ratio_tail. """
    return pd.DataFrame({'re_lambda': [v.lam.real for v in verdicts],
                         'im_lambda': [v.lam.imag for v in verdicts],
                         'smooth': [bool(v.smooth) for v in verdicts],
                         'evidence': [v.evidence.value for v in verdicts],
                         'ratio_tail': [v.ratio_tail for v in verdicts]},
                        columns=['re_lambda', 'im_lambda', 'smooth', 'evidence', 'ratio_tail'])
