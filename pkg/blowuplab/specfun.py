# -*- coding: utf-8 -*-
"""
Special-function kernels used by the mode-stability scan and the Frobenius
machinery: rising factorials, the Gauss hypergeometric series with explicit
convergence control and the coefficient ratio of the stability series.

Every function here is pure and safe to call from concurrent scan tasks.
"""
from collections import namedtuple
import math

import numpy as np
from scipy import special

from . import config
from .logger import logger
from .utils import NumericalFailure, ParameterError, DomainError, NoConvergence, as_complex, nearest_integer


class PoleOfC(NumericalFailure):
    pass


class PoleOfGamma(NumericalFailure):
    pass


class DegenerateCoefficient(NumericalFailure):
    pass


SeriesEvaluation = namedtuple('SeriesEvaluation', 'value terms_used truncation_estimate terminated')

# running products are exact enough below this order, log-gamma is used above
_PRODUCT_CUTOFF = 256


def _check_order(n):
    if int(n) != n or n < 0:
        raise ParameterError('order must be a nonnegative integer, got {}'.format(n))
    return int(n)


def nonpositive_integer(z, tol=None):
    """ Return ``m <= 0`` when ``z`` lies within ``tol`` of the nonpositive integer ``m``, else ``None``. """
    tol = config.tol if tol is None else tol
    m = nearest_integer(z, tol)
    if m is not None and m <= 0:
        return m
    return None


def log_gamma(z):
    """ Principal branch of log Gamma.

    Args:
        z (complex): Argument, not a nonpositive integer

    Returns:
        complex: ``log Gamma(z)``

    Raises:
        PoleOfGamma: If ``z`` is a nonpositive integer
    """
    z = as_complex(z, 'z')
    if nonpositive_integer(z) is not None:
        raise PoleOfGamma('Gamma has a pole at z = {}'.format(z))
    return complex(special.loggamma(z))


def pochhammer(a, n):
    """ Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``, with ``(a)_0 = 1`` exactly.

    Args:
        a (complex): Base
        n (int): Nonnegative order

    Returns:
        complex: The rising factorial
    """
    a = as_complex(a, 'a')
    n = _check_order(n)
    if n == 0:
        return 1 + 0j

    m = nonpositive_integer(a)
    if m is not None and -m < n:
        return 0j

    if n <= _PRODUCT_CUTOFF or m is not None or nonpositive_integer(a + n) is not None:
        value = 1 + 0j
        for j in range(n):
            value *= a + j
        return value

    return complex(np.exp(log_gamma(a + n) - log_gamma(a)))


def gauss_2f1(a, b, c, z, tol=None, max_terms=None):
    """ Partial sum of the Gauss hypergeometric series ``2F1(a, b; c; z)``.

    Terms are generated with the running ratio
    ``t_{n+1} / t_n = (a+n)(b+n) z / ((c+n)(n+1))``, never with raw factorials.
    Summation stops when the first omitted term is below ``tol``; polynomial cases
    (``a`` or ``b`` a nonpositive integer) are summed exactly and flagged.

    Args:
        a (complex): First numerator parameter
        b (complex): Second numerator parameter
        c (complex): Denominator parameter
        z (complex): Argument, ``|z| < 1`` unless the series terminates
        tol (float, optional): Bound on the first omitted term (default: ``config.tol``)
        max_terms (int, optional): Term budget (default: ``config.max_terms``)

    Returns:
        SeriesEvaluation: value, number of terms, truncation estimate and termination flag

    Raises:
        DomainError: If ``|z| >= 1`` and the series does not terminate
        PoleOfC: If ``c + n`` vanishes before the series terminates
        NoConvergence: If the term budget is exhausted
    """
    a, b, c, z = (as_complex(v, name) for v, name in ((a, 'a'), (b, 'b'), (c, 'c'), (z, 'z')))
    tol = config.tol if tol is None else tol
    max_terms = config.max_terms if max_terms is None else max_terms

    degrees = [-m for m in (nonpositive_integer(a), nonpositive_integer(b)) if m is not None]
    degree = min(degrees) if degrees else None

    c_pole = nonpositive_integer(c)
    if c_pole is not None and (degree is None or -c_pole < degree):
        raise PoleOfC('c = {} hits a nonpositive integer before the series terminates'.format(c))

    if degree is None and abs(z) >= 1:
        raise DomainError('|z| = {} outside the unit disc for a non-terminating series'.format(abs(z)))

    term = 1 + 0j
    total = 1 + 0j
    for n in range(max_terms):
        if degree is not None and n == degree:
            return SeriesEvaluation(total, n + 1, 0.0, True)
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        if abs(term) <= tol:
            return SeriesEvaluation(total, n + 1, abs(term), False)
        total += term

    msg = '2F1({}, {}; {}; {}) did not converge in {} terms, last term {:.3e}'.format(a, b, c, z, max_terms, abs(term))
    logger.error(msg)
    raise NoConvergence(msg)


def _check_alpha(alpha):
    if not alpha > 0:
        raise ParameterError('alpha must be > 0, got {}'.format(alpha))
    return float(alpha)


def is_mode_eigenvalue(lam, tol=None):
    """ Whether ``lam`` sits within ``tol`` of one of the symmetry eigenvalues 0 and 1. """
    tol = config.snap_tol if tol is None else tol
    m = nearest_integer(as_complex(lam, 'lambda'), tol)
    return m in (0, 1)


def coefficient_ratio_rn(lam, alpha, n):
    """ Ratio ``a_{n+1}(lambda) / a_n(lambda)`` of the stability series coefficients

    ``a_n = (lambda)_n (lambda-1)_n / ((lambda + sqrt(1+alpha))_n n!)``.

    Raises:
        DegenerateCoefficient: If ``lambda`` is 0 or 1, where the series terminates
    """
    lam = as_complex(lam, 'lambda')
    alpha = _check_alpha(alpha)
    n = _check_order(n)
    if is_mode_eigenvalue(lam):
        raise DegenerateCoefficient('series terminates at lambda = {}, the ratio is undefined'.format(lam))
    root = math.sqrt(1 + alpha)
    return (lam + n) * (lam + n - 1) / ((lam + root + n) * (n + 1))


def coefficient_ratios(lam, alpha, n_max):
    """ Vector of ``r_n(lambda)`` for ``n = 0 .. n_max``. """
    lam = as_complex(lam, 'lambda')
    root = math.sqrt(_check_alpha(alpha) + 1)
    n = np.arange(n_max + 1, dtype=float)
    return (lam + n) * (lam + n - 1) / ((lam + root + n) * (n + 1))


def stability_coefficient(lam, alpha, n):
    """ ``a_n(lambda)`` computed directly from rising factorials. """
    lam = as_complex(lam, 'lambda')
    root = math.sqrt(_check_alpha(alpha) + 1)
    n = _check_order(n)
    numerator = pochhammer(lam, n) * pochhammer(lam - 1, n) if n <= 80 else None
    if numerator is not None:
        return numerator / (pochhammer(lam + root, n) * math.factorial(n))
    if nonpositive_integer(lam) is not None or nonpositive_integer(lam - 1) is not None:
        return 0j
    # squared factorials overflow doubles past n = 85
    log_value = (log_gamma(lam + n) - log_gamma(lam) + log_gamma(lam - 1 + n) - log_gamma(lam - 1)
                 - log_gamma(lam + root + n) + log_gamma(lam + root) - special.gammaln(n + 1))
    return complex(np.exp(log_value))
