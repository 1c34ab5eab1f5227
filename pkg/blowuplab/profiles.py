# -*- coding: utf-8 -*-
"""
The five-parameter family of generalized self-similar blow-up solutions

``u(t, x) = -alpha log(1 - t/T) + U~((x - x0) / (T - t))``

of ``u_tt - u_xx = (u_x)^2``, its derivative reformulation ``H = U~'`` and the
witness that no exact smooth self-similar solution exists.
"""
from collections import namedtuple
import math
import warnings

import numpy as np
import pandas as pd
from scipy import integrate, optimize

from . import config
from .logger import logger
from .utils import ParameterError, DomainError, OutsideLightcone, QuadratureFailure

SelfSimilarPoint = namedtuple('SelfSimilarPoint', 's y')
StationaryWitness = namedtuple('StationaryWitness', 'c root residual')


def parse_beta(beta):
    """ Accept a nonnegative float or the ``inf`` token. """
    if isinstance(beta, str):
        token = beta.strip().lower()
        if token in ('inf', 'infinity', '+inf'):
            return math.inf
        beta = float(token)
    beta = float(beta)
    if math.isnan(beta) or beta < 0:
        raise ParameterError('beta must be >= 0 or inf, got {}'.format(beta))
    return beta


class ProfileParams(object):
    """ One member ``(alpha, beta, kappa, T, x0)`` of the blow-up family.

    Args:
        alpha (float): Growth rate of the logarithmic blow-up, must be > 0
            unless ``permissive`` is set
        beta (float, str): Shape parameter, ``0``, a finite positive number or ``'inf'``
        kappa (float, optional): Additive constant (default: ``0``)
        T (float, optional): Blow-up time (default: ``1``)
        x0 (float, optional): Blow-up point (default: ``0``)
        permissive (bool, optional): Evaluate ``alpha <= 0`` profiles for exploration
            (default: ``False``)
    """

    def __init__(self, alpha, beta=math.inf, kappa=0., T=1., x0=0., permissive=False):
        alpha = float(alpha)
        if not permissive and not alpha > 0:
            raise ParameterError('alpha must be > 0 for the smooth family (got {}): for alpha <= 0 there is '
                                 'always a singular point inside the light cone'.format(alpha))
        if not alpha > -1:
            raise ParameterError('alpha must be > -1 even in permissive mode, got {}'.format(alpha))
        if not T > 0:
            raise ParameterError('blow-up time T must be > 0, got {}'.format(T))

        self.alpha = alpha
        self.beta = parse_beta(beta)
        self.kappa = float(kappa)
        self.T = float(T)
        self.x0 = float(x0)
        self.permissive = permissive

        if self.reduced_regularity:
            logger.warning('[Profile] sqrt(1+alpha) = {} is not an integer with 0 < beta < inf: '
                           'profile has reduced regularity at y = -1'.format(self.root))

    @property
    def root(self):
        """ ``sqrt(1 + alpha)`` """
        return math.sqrt(1 + self.alpha)

    @property
    def mu(self):
        """ ``2 alpha sqrt(1 + alpha) beta``, the scale of the bracket in ``dW/dy`` """
        return 2 * self.alpha * self.root * self.beta

    @property
    def reduced_regularity(self):
        finite_positive = 0 < self.beta < math.inf
        return finite_positive and abs(self.root - round(self.root)) > 1e-12

    def with_values(self, **kwargs):
        values = self.to_dict()
        values.update(kwargs)
        values.pop('reduced_regularity')
        return ProfileParams(**values)

    def to_dict(self):
        return {'alpha': self.alpha,
                'beta': self.beta,
                'kappa': self.kappa,
                'T': self.T,
                'x0': self.x0,
                'permissive': self.permissive,
                'reduced_regularity': self.reduced_regularity}

    def __repr__(self):
        return 'ProfileParams(alpha={}, beta={}, kappa={}, T={}, x0={})'.format(
            self.alpha, self.beta, self.kappa, self.T, self.x0)


def p_c_eval(c, y):
    """ ``p_c(y) = c (y^2 - 1) + (2y + (y^2 - 1) log|(y-1)/(y+1)|) / 4``,
    with the limits ``-1/2`` and ``1/2`` returned exactly at ``y = -1`` and ``y = 1``. """
    if y == -1:
        return -0.5
    if y == 1:
        return 0.5
    if abs(y) > 1:
        raise DomainError('p_c is defined on [-1, 1], got y = {}'.format(y))
    return c * (y * y - 1) + 0.25 * (2 * y + (y * y - 1) * math.log(abs((y - 1) / (y + 1))))


def find_stationary_singularity(c):
    """ Locate a zero of ``p_c`` inside ``(-1, 1)`` by bisection.

    A zero always exists since ``p_c(-1) < 0 < p_c(1)``; it is the point where an
    exact smooth self-similar profile would have to be singular.
    """
    root = optimize.bisect(lambda y: p_c_eval(c, y), -1., 1., xtol=1e-15, maxiter=500)
    witness = StationaryWitness(float(c), root, abs(p_c_eval(c, root)))
    logger.debug('[Witness] c={} root={:.17g} residual={:.3e}'.format(c, root, witness.residual))
    return witness


def stationary_witness_table(cs):
    """ Witnesses for several ``c`` as a table with columns c, root, residual. """
    return pd.DataFrame([find_stationary_singularity(c)._asdict() for c in cs])


def _h_values(alpha, beta, y):
    s = math.sqrt(1 + alpha)
    y = np.asarray(y, dtype=float)
    if beta == 0:
        return alpha / (s - y)
    if math.isinf(beta):
        return -alpha / (s + y)

    with np.errstate(divide='ignore'):
        log_rho = np.log1p(-y) - np.log1p(y)
    lt = np.atleast_1d(math.log(2 * alpha * s * beta) + s * log_rho)
    yy = np.atleast_1d(y)
    out = np.empty(lt.shape)
    pos = lt > 0
    e = np.exp(-lt[pos])
    out[pos] = alpha * (e - 1) / ((s - yy[pos]) * e + (s + yy[pos]))
    e = np.exp(lt[~pos])
    out[~pos] = alpha * (1 - e) / ((s - yy[~pos]) + e * (s + yy[~pos]))
    return out.reshape(y.shape)


def _dw_values(alpha, beta, y):
    s = math.sqrt(1 + alpha)
    y = np.asarray(y, dtype=float)
    if beta == 0:
        return 2 * alpha * s / ((s - y) * (s + y))
    if math.isinf(beta):
        return np.zeros(y.shape)

    with np.errstate(divide='ignore'):
        log_rho = np.log1p(-y) - np.log1p(y)
    lt = np.atleast_1d(math.log(2 * alpha * s * beta) + s * log_rho)
    yy = np.atleast_1d(y)
    out = np.empty(lt.shape)
    pos = lt > 0
    e = np.exp(-lt[pos])
    out[pos] = 2 * alpha * s * e / ((s + yy[pos]) * ((s - yy[pos]) * e + (s + yy[pos])))
    e = np.exp(lt[~pos])
    out[~pos] = 2 * alpha * s / ((s + yy[~pos]) * ((s - yy[~pos]) + e * (s + yy[~pos])))
    return out.reshape(y.shape)


def _check_y(y):
    if np.any(np.abs(y) > 1):
        raise DomainError('similarity coordinate must satisfy |y| <= 1, got {}'.format(y))


def dW_dy(params, y):
    """ Derivative of the correction ``W`` in ``U~ = -alpha log(sqrt(1+alpha) + y) + W``.

    Computed in the form ``2 alpha s / ((s - y)(s + y)) * expit(-log X)`` with
    ``X = mu ((1-y)/(1+y))^s (s+y)/(s-y)``, which stays finite for ``beta -> 0``
    and ``beta -> inf``.
    """
    _check_y(y)
    value = _dw_values(params.alpha, params.beta, y)
    return float(value) if np.ndim(value) == 0 else value


def H_eval(alpha, beta, y):
    """ ``H_{alpha,beta}(y) = U~'(y)``, the self-similar profile of ``h = u_x``.

    Args:
        alpha (float): Family parameter
        beta (float): ``0``, finite positive, or ``math.inf``
        y (float, numpy.ndarray): Points of ``[-1, 1]``

    Returns:
        float or numpy.ndarray: ``H`` with the one-sided endpoint limits
        ``-1 - sqrt(1+alpha)`` at ``y = -1`` and ``1 + sqrt(1+alpha)`` at ``y = 1``
        for finite positive ``beta``
    """
    _check_y(y)
    value = _h_values(alpha, parse_beta(beta), y)
    return float(value) if np.ndim(value) == 0 else value


def dtildeU_eval(params, y):
    """ Analytic ``U~'(y)``. """
    return H_eval(params.alpha, params.beta, y)


def H_symmetric_beta(alpha, beta):
    """ ``beta' = 1 / (4 alpha^2 (1+alpha) beta)``, for which ``H_{alpha,beta}(-y) = -H_{alpha,beta'}(y)``. """
    beta = parse_beta(beta)
    if beta == 0:
        return math.inf
    if math.isinf(beta):
        return 0.
    return 1. / (4 * alpha * alpha * (1 + alpha) * beta)


def tildeU_eval(params, y, quad_tol=None, force_quadrature=False):
    """ Self-similar profile ``U~(y) = kappa - alpha log sqrt(1+alpha) + int_0^y H``.

    Args:
        params (ProfileParams): Family member
        y (float): Point of ``[-1, 1]``
        quad_tol (float, optional): Absolute quadrature tolerance (default: ``config.quad_tol``)
        force_quadrature (bool, optional): Integrate even when a closed form exists

    Raises:
        QuadratureFailure: If the adaptive quadrature exhausts its subdivision budget
    """
    _check_y(y)
    y = float(y)
    quad_tol = config.quad_tol if quad_tol is None else quad_tol
    alpha, beta, s = params.alpha, params.beta, params.root

    if not force_quadrature:
        if beta == 0:
            return params.kappa - alpha * math.log(s - y)
        if math.isinf(beta):
            return params.kappa - alpha * math.log(s + y)

    base = params.kappa - alpha * math.log(s)
    if y == 0:
        return base

    with warnings.catch_warnings():
        warnings.simplefilter('error', integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(lambda z: float(_h_values(alpha, beta, z)), 0., y,
                                           epsabs=quad_tol, epsrel=0., limit=config.quad_limit)
        except integrate.IntegrationWarning as e:
            msg = 'quadrature of H on [0, {}] failed for {}: {}'.format(y, params, e)
            logger.error(msg)
            raise QuadratureFailure(msg)
    if abserr > quad_tol:
        msg = 'quadrature error estimate {:.3e} above tolerance {:.3e}'.format(abserr, quad_tol)
        logger.error(msg)
        raise QuadratureFailure(msg)
    return base + value


def _riccati(alpha, beta, y, h):
    if h <= 0 or abs(y) > 1 - 2 * h:
        raise DomainError('residual stencil needs |y| <= 1 - 2h, got y = {}, h = {}'.format(y, h))
    first = float(_h_values(alpha, beta, y))
    second = float(_h_values(alpha, beta, y + h) - _h_values(alpha, beta, y - h)) / (2 * h)
    return abs(2 * y * first + (y * y - 1) * second + alpha - first * first)


def riccati_residual(params, y, h=None):
    """ ``|2y U~' + (y^2-1) U~'' + alpha - (U~')^2|`` with analytic ``U~'`` and a centered
    second difference of width ``h`` (default: ``config.fd_h``). """
    return _riccati(params.alpha, params.beta, y, config.fd_h if h is None else h)


def stationary_h_residual(alpha, beta, y, h=None):
    """ Residual of ``(y^2-1) H' + 2yH + alpha - H^2 = 0`` with a finite-difference ``H'``. """
    return _riccati(alpha, parse_beta(beta), y, config.fd_h if h is None else h)


def self_similar_coordinates(params, t, x):
    """ ``s = -log((T-t)/T)``, ``y = (x-x0)/(T-t)`` for a point of the backward light cone. """
    _check_lightcone(params, t, x)
    tau = params.T - t
    return SelfSimilarPoint(-math.log(tau / params.T), (x - params.x0) / tau)


def physical_coordinates(params, point):
    """ Inverse of :func:`self_similar_coordinates`, returns ``(t, x)``. """
    tau = params.T * math.exp(-point.s)
    return params.T - tau, params.x0 + point.y * tau


def _check_lightcone(params, t, x):
    if not 0 <= t < params.T or abs(x - params.x0) > (params.T - t) * (1 + 1e-14):
        raise OutsideLightcone('(t={}, x={}) is outside the backward light cone of (T={}, x0={})'.format(
            t, x, params.T, params.x0))


def physical_u_eval(params, t, x, quad_tol=None):
    """ ``u(t, x) = -alpha log(1 - t/T) + U~((x-x0)/(T-t))`` on the backward light cone. """
    _check_lightcone(params, t, x)
    y = min(1., max(-1., (x - params.x0) / (params.T - t)))
    return -params.alpha * math.log1p(-t / params.T) + tildeU_eval(params, y, quad_tol)


def profile_table(params, samples, quad_tol=None):
    """ Uniform samples of the profile as a table with columns y, tildeU, dtildeU, H. """
    if samples < 2:
        raise ParameterError('need at least 2 samples, got {}'.format(samples))
    y = np.linspace(-1., 1., samples)
    h = _h_values(params.alpha, params.beta, y)
    frame = pd.DataFrame({'y': y,
                          'tildeU': [tildeU_eval(params, v, quad_tol) for v in y],
                          'dtildeU': h,
                          'H': h})
    logger.info('[Profile OK] {} samples for {}'.format(samples, params))
    return frame

