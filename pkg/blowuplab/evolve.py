# -*- coding: utf-8 -*-
"""
Evolution in self-similar variables ``s = -log((T-t)/T)``, ``y = (x-x0)/(T-t)``.

The perturbation ``q = (q1, q2)`` of the profile obeys ``d_s q = L_alpha q + N(q)``
with ``N(q) = (0, (d_y q1)^2)``. The unstable directions ``g0, f0, f1`` are
absorbed by refitting the profile parameters ``(alpha, kappa, T)``.
"""
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import math

import numpy as np
import pandas as pd
from scipy import integrate, linalg
from sklearn.linear_model import LinearRegression

from . import config
from .grid import CollocationGrid, GridFunctionPair
from .linop import (check_pair, assemble_matrix, inner_dblk, mode_callables, norm_dblk, symmetry_modes,
                    SpectralProjector)
from .logger import logger, scan_logger
from .run_config import Perturbation, cfl_dt as cfl_rule
from .utils import (HypothesisViolation, Instability, NoConvergence, NumericalFailure, ParameterError)


class BlowupInFrame(NumericalFailure):
    """ The stable part keeps growing: the data left the basin of the fitted profile. """
    pass


class SingularGram(NumericalFailure):
    pass


GramDual = namedtuple('GramDual', 'gram duals basis')
ModulationFit = namedtuple('ModulationFit', 'alpha_star kappa_star T_star residual iterations')

_BLOWUP_FACTOR = 1e3
_BLOWUP_RUN = 5
_NORM_CEILING = 1e12


class EvolutionTrace(object):
    """ Samples of an evolution, aligned by index.

    Args:
        seed (int, optional): Seed of the perturbation, echoed in the outputs
    """

    columns = ('norm_k', 'proj_f0', 'proj_f1', 'proj_g0', 'stable_norm')

    def __init__(self, seed=None):
        self.times = []
        self.norm_k = []
        self.proj_f0 = []
        self.proj_f1 = []
        self.proj_g0 = []
        self.stable_norm = []
        self.states = []
        self.fitted = None
        self.seed = seed

    def append(self, s, norm, projections, stable_norm=None):
        self.times.append(float(s))
        self.norm_k.append(float(norm))
        self.proj_g0.append(float(projections[0]))
        self.proj_f0.append(float(projections[1]))
        self.proj_f1.append(float(projections[2]))
        if stable_norm is not None:
            self.stable_norm.append(float(stable_norm))

    def __len__(self):
        return len(self.times)

    def to_frame(self):
        frame = pd.DataFrame({'s': self.times,
                              'norm_k': self.norm_k,
                              'proj_f0': self.proj_f0,
                              'proj_f1': self.proj_f1,
                              'proj_g0': self.proj_g0})
        if self.stable_norm:
            frame['stable_norm'] = self.stable_norm
        return frame

    def summary(self):
        payload = {'samples': len(self), 'seed': self.seed}
        if self.fitted is not None:
            payload['fitted'] = dict(self.fitted._asdict())
        return payload


def trace_to_frame(trace):
    return trace.to_frame()


def nonlinearity(grid, q):
    """ ``N(q) = (0, (d_y q1)^2)`` with collocation differentiation. """
    check_pair(grid, q)
    dq1 = grid.derivative(q.q1, 1)
    return GridFunctionPair(grid, np.zeros(grid.size), dq1 * dq1)


def nonlinearity_lipschitz(grid, q, r, k=0):
    """ Empirical ``|N(q) - N(r)|_k / ((|q|_k + |r|_k) |q - r|_k)``. """
    distance = norm_dblk(grid, q - r, k)
    if distance == 0:
        return 0.
    numerator = norm_dblk(grid, nonlinearity(grid, q) - nonlinearity(grid, r), k)
    return numerator / ((norm_dblk(grid, q, k) + norm_dblk(grid, r, k)) * distance)


def rk4_step(rhs, v, dt):
    """ One classical Runge-Kutta step of ``v' = rhs(v)``. """
    k1 = rhs(v)
    k2 = rhs(v + 0.5 * dt * k1)
    k3 = rhs(v + 0.5 * dt * k2)
    k4 = rhs(v + dt * k3)
    return v + dt / 6. * (k1 + 2 * k2 + 2 * k3 + k4)


def cfl_dt(grid):
    return cfl_rule(grid.N)


def _steps(cfg):
    n_steps = int(math.ceil(cfg.s_max / cfg.dt - 1e-9))
    return n_steps, cfg.s_max / n_steps


def gram_dual_basis(alpha, grid, k_norm=None):
    """ Gram matrix of ``(g0, f0, f1)`` in ``Re <<., .>>_k`` and the dual basis.

    Returns:
        GramDual: ``gram`` (3x3), ``duals`` with ``<<basis_i, duals_j>> = delta_ij`` and ``basis``

    Raises:
        SingularGram: If the Cholesky factorization fails
    """
    k_norm = config.k_norm if k_norm is None else k_norm
    modes = symmetry_modes(alpha, grid)
    basis = [modes.g0, modes.f0, modes.f1]
    gram = np.array([[inner_dblk(grid, bi, bj, k_norm).real for bj in basis] for bi in basis])
    try:
        factor = linalg.cho_factor(gram)
    except linalg.LinAlgError as e:
        msg = 'Gram matrix of the symmetry modes is not positive definite (alpha = {}, N = {}): {}'.format(
            alpha, grid.N, e)
        logger.error(msg)
        raise SingularGram(msg)
    inverse = linalg.cho_solve(factor, np.eye(3))
    duals = []
    for j in range(3):
        dual = GridFunctionPair.zeros(grid)
        for i in range(3):
            dual = dual + inverse[j, i] * basis[i]
        duals.append(dual)
    return GramDual(gram, duals, basis)


def _dual_projections(grid, q, dual, k_norm):
    return [inner_dblk(grid, q, g, k_norm).real for g in dual.duals]


def evolve_linear(alpha, grid, q0, cfg, keep_states=False):
    """ RK4 integration of ``d_s q = L_alpha q`` from ``q0`` up to ``cfg.s_max``.

    Args:
        alpha (float): Family parameter, > 0
        grid (CollocationGrid): Carrier grid
        q0 (GridFunctionPair): Initial state
        cfg (EvolutionConfig): Time step, sampling and working norm
        keep_states (bool, optional): Also store the sampled states in ``trace.states``

    Returns:
        EvolutionTrace: norms in ``<<., .>>_{k_norm}`` and dual-basis projections

    Raises:
        Instability: If the norm exceeds ``1e12``
    """
    check_pair(grid, q0)
    matrix = assemble_matrix(alpha, grid)
    dual = gram_dual_basis(alpha, grid, cfg.k_norm)
    n_steps, dt = _steps(cfg)
    trace = EvolutionTrace()

    v = q0.to_vector()
    for step in range(n_steps + 1):
        if step > 0:
            v = rk4_step(matrix.dot, v, dt)
        if step % cfg.sample_every == 0 or step == n_steps:
            q = GridFunctionPair.from_vector(grid, v)
            norm = _checked_norm(grid, q, cfg.k_norm, step * dt)
            trace.append(step * dt, norm, _dual_projections(grid, q, dual, cfg.k_norm))
            if keep_states:
                trace.states.append(q)
    logger.info('[Linear] alpha = {}: {} samples up to s = {}'.format(alpha, len(trace), cfg.s_max))
    return trace


def linear_mode_law(modes, s, g0=0., f0=0., f1=0.):
    """ Exact linear evolution of ``g0 * g0 + f0 * f0 + f1 * f1`` at time ``s``:
    ``f1`` grows like ``exp(s)`` and ``g0`` drifts along ``f0`` at unit speed. """
    return (f1 * math.exp(s)) * modes.f1 + g0 * modes.g0 + (f0 + g0 * s) * modes.f0


def linear_law_deviation(alpha, grid, trace, g0=0., f0=0., f1=0., k=0):
    """ Largest ``|q(s) - law(s)|_k / |law(s)|_k`` over the states kept by :func:`evolve_linear`. """
    if not trace.states:
        raise ParameterError('the trace holds no states, run evolve_linear with keep_states=True')
    modes = symmetry_modes(alpha, grid)
    worst = 0.
    for s, q in zip(trace.times, trace.states):
        law = linear_mode_law(modes, s, g0, f0, f1)
        worst = max(worst, norm_dblk(grid, q - law, k) / norm_dblk(grid, law, k))
    return worst


def _checked_norm(grid, q, k_norm, s):
    if not q.is_finite():
        msg = 'state is not finite at s = {:.4f}; the time step violates the stability bound'.format(s)
        logger.error(msg)
        raise Instability(msg)
    norm = norm_dblk(grid, q, k_norm)
    if norm > _NORM_CEILING:
        msg = 'norm {:.3e} exceeds {:.0e} at s = {:.4f}; the time step violates the stability bound'.format(
            norm, _NORM_CEILING, s)
        logger.error(msg)
        raise Instability(msg)
    return norm


def _profile_parts(alpha, kappa, y):
    s = math.sqrt(1. + alpha)
    return kappa - alpha * np.log(s + y), alpha - alpha * y / (s + y)


def initial_data_map(cfg, alpha, kappa, T, f=None, grid=None):
    """ Self-similar data of the perturbed profile ``(alpha0, kappa0, T0)`` seen from the
    profile ``(alpha, kappa, T)``: ``f^T + f0^T - f_{alpha, kappa}`` at the nodes.

    Args:
        cfg (EvolutionConfig): Reference profile
        alpha (float): Candidate growth rate, > 0
        kappa (float): Candidate constant
        T (float): Candidate blow-up time
        f (tuple(callable, callable), optional): Perturbation of ``(u, u_t)`` at ``t = 0`` as
            functions of ``x - x0``; ``None`` for no perturbation
        grid (CollocationGrid, optional): Carrier grid (default: degree ``cfg.grid_N``)

    Raises:
        HypothesisViolation: If ``T >= T0 sqrt(1 + alpha0)``, where the reference profile is
            singular inside the candidate light cone
    """
    grid = CollocationGrid(cfg.grid_N) if grid is None else grid
    root0 = math.sqrt(1. + cfg.alpha0)
    if not T < cfg.T0 * root0:
        raise HypothesisViolation('T = {} must be < T0 sqrt(1 + alpha0) = {}'.format(T, cfg.T0 * root0))
    if not T > 0 or not alpha > 0:
        raise ParameterError('need T > 0 and alpha > 0, got T = {}, alpha = {}'.format(T, alpha))

    y = grid.nodes
    ratio = T / cfg.T0
    z = ratio * y
    first = cfg.kappa0 - cfg.alpha0 * np.log(root0 + z)
    second = ratio * cfg.alpha0 - ratio * ratio * y * cfg.alpha0 / (root0 + z)

    own1, own2 = _profile_parts(alpha, kappa, y)
    first = first - own1
    second = second - own2
    if f is not None:
        first = first + np.broadcast_to(f[0](T * y), y.shape)
        second = second + T * np.broadcast_to(f[1](T * y), y.shape)
    return GridFunctionPair(grid, first, second)


def mode_perturbation(cfg, which, eps=None):
    """ Physical data whose self-similar image at ``T0`` is ``eps`` times a symmetry mode. """
    eps = cfg.eps if eps is None else eps
    if which not in Perturbation.Modes:
        raise ParameterError('unknown mode {!r}'.format(which))
    func = mode_callables(cfg.alpha0)[which]
    T0 = cfg.T0

    def first(x):
        return eps * func(np.asarray(x) / T0)[0]

    def second(x):
        return eps * func(np.asarray(x) / T0)[1] / T0

    return first, second


def random_perturbation(eps, seed, even=False, degree=3):
    """ Smooth random trigonometric data ``eps * sum (a_m cos(mx) + b_m sin(mx)) / (1 + m^2)``,
    normalized coefficientwise; the generator is seeded with ``seed``. """
    rng = np.random.default_rng(seed)
    m = np.arange(degree + 1)
    components = []
    for _ in range(2):
        a = rng.standard_normal(degree + 1) / (1 + m * m)
        b = np.zeros(degree + 1) if even else rng.standard_normal(degree + 1) / (1 + m * m)
        scale = math.sqrt(np.sum(a * a) + np.sum(b * b))
        components.append((a / scale, b / scale))

    def make(a, b):
        def component(x):
            x = np.asarray(x, dtype=float)[..., None]
            return eps * np.sum(a * np.cos(m * x) + b * np.sin(m * x), axis=-1)
        return component

    return make(*components[0]), make(*components[1])


def build_perturbation(cfg, kind):
    if kind == Perturbation.Zero:
        return None
    if kind == Perturbation.Random:
        return random_perturbation(cfg.eps, cfg.seed, even=True)
    return mode_perturbation(cfg, kind)


def fit_modulation(cfg, perturbation=None, moments=None, grid=None, tol=1e-8, max_iter=50):
    """ Fixed-point fit of ``(alpha*, kappa*, T*)`` so that the symmetry-mode content of the
    corrected data cancels the accumulated nonlinear moments.

    The data of the candidate profile expand as ``(alpha0-alpha) g0 + [(kappa0-kappa) -
    alpha (T/T0-1)] f0 + (T/T0-1) f1`` plus terms of the perturbation; each iteration solves
    this linear part against the remaining coefficients.

    Args:
        cfg (EvolutionConfig): Reference profile
        perturbation (tuple(callable, callable), optional): Physical data perturbation
        moments (numpy.ndarray, optional): Nonlinear moments along ``(g0, f0, f1)``
        grid (CollocationGrid, optional): Carrier grid
        tol (float, optional): Target on the largest coefficient
        max_iter (int, optional): Iteration cap

    Raises:
        NoConvergence: If the cap is reached, with the last residual in the message
    """
    grid = CollocationGrid(cfg.grid_N) if grid is None else grid
    moments = np.zeros(3) if moments is None else np.asarray(moments, dtype=float)
    alpha, kappa, T = cfg.alpha0, cfg.kappa0, cfg.T0
    residual = math.inf
    for iteration in range(max_iter + 1):
        data = initial_data_map(cfg, alpha, kappa, T, perturbation, grid)
        coefficients = SpectralProjector(alpha, grid).coefficients(data).real
        ell = coefficients + moments
        residual = float(np.max(np.abs(ell)))
        logger.debug('[Modulation] iteration {}: residual {:.3e}'.format(iteration, residual))
        if residual < tol:
            fit = ModulationFit(alpha, kappa, T, residual, iteration)
            logger.info('[Modulation] {}'.format(fit))
            return fit
        ratio = T / cfg.T0
        linear = np.array([cfg.alpha0 - alpha, (cfg.kappa0 - kappa) - alpha * (ratio - 1), ratio - 1])
        target = linear - ell
        alpha = cfg.alpha0 - target[0]
        T = cfg.T0 * (1 + target[2])
        kappa = cfg.kappa0 - target[1] - alpha * target[2]
    msg = 'modulation fit did not converge in {} iterations, last residual {:.3e}'.format(max_iter, residual)
    logger.error(msg)
    raise NoConvergence(msg)


def nonlinear_moments(times, coefficients):
    """ Moments of the projected nonlinearity that the unstable directions accumulate:
    ``int N_g0``, ``int (N_f0 - s N_g0)`` and ``int exp(-s) N_f1``. """
    s = np.asarray(times)
    c = np.asarray(coefficients)
    if len(s) < 2:
        return np.zeros(3)
    return np.array([integrate.trapezoid(c[:, 0], s),
                     integrate.trapezoid(c[:, 1] - s * c[:, 0], s),
                     integrate.trapezoid(np.exp(-s) * c[:, 2], s)])


def _check_frame(trace, scale):
    norms = trace.stable_norm
    if len(norms) <= _BLOWUP_RUN or norms[-1] <= _BLOWUP_FACTOR * scale:
        return
    tail = norms[-_BLOWUP_RUN - 1:]
    if all(b > a for a, b in zip(tail, tail[1:])):
        msg = 'stable part grew to {:.3e} (initial size {:.3e}) at s = {:.3f}'.format(
            norms[-1], scale, trace.times[-1])
        logger.error(msg)
        raise BlowupInFrame(msg)


def _run_nonlinear(cfg, grid, fit, perturbation):
    alpha = fit.alpha_star
    matrix = assemble_matrix(alpha, grid)
    projector = SpectralProjector(alpha, grid)
    dual = gram_dual_basis(alpha, grid, cfg.k_norm)
    q0 = initial_data_map(cfg, alpha, fit.kappa_star, fit.T_star, perturbation, grid)
    scale = norm_dblk(grid, q0, cfg.k_norm)
    n = grid.size

    def rhs(v):
        dq1 = grid.derivative(v[:n], 1)
        out = matrix.dot(v)
        out[n:] += dq1 * dq1
        return out

    n_steps, dt = _steps(cfg)
    trace = EvolutionTrace(seed=cfg.seed)
    times, coefficients = [], []
    v = q0.to_vector().real
    for step in range(n_steps + 1):
        if step > 0:
            v = rk4_step(rhs, v, dt)
        if step % cfg.sample_every == 0 or step == n_steps:
            s = step * dt
            q = GridFunctionPair.from_vector(grid, v)
            norm = _checked_norm(grid, q, cfg.k_norm, s)
            stable = norm_dblk(grid, projector.stable_part(q), cfg.k_norm)
            trace.append(s, norm, _dual_projections(grid, q, dual, cfg.k_norm), stable)
            times.append(s)
            coefficients.append(projector.coefficients(nonlinearity(grid, q)).real)
            _check_frame(trace, scale)
    return trace, nonlinear_moments(times, coefficients)


def evolve_nonlinear(cfg, perturbation=None, grid=None):
    """ Evolution of the perturbed profile in the self-similar frame of the fitted parameters.

    Each of the ``cfg.modulation_passes`` rounds fits ``(alpha*, kappa*, T*)`` against the
    nonlinear moments of the previous round and evolves ``d_s q = L_alpha* q + N(q)``.

    Args:
        cfg (EvolutionConfig): Reference profile and integration settings
        perturbation (tuple(callable, callable), optional): Physical data perturbation
        grid (CollocationGrid, optional): Carrier grid

    Returns:
        EvolutionTrace: with ``stable_norm`` samples and the final ``fitted`` parameters

    Raises:
        Instability: If the state stops being finite or bounded
        BlowupInFrame: If the stable part grows monotonically beyond ``1e3`` times its initial size
    """
    grid = CollocationGrid(cfg.grid_N) if grid is None else grid
    moments = None
    for round_index in range(cfg.modulation_passes):
        fit = fit_modulation(cfg, perturbation, moments, grid)
        trace, moments = _run_nonlinear(cfg, grid, fit, perturbation)
        logger.info('[Nonlinear] pass {}: alpha* = {:.10f}, moments {}'.format(round_index + 1, fit.alpha_star,
                                                                             moments))
    trace.fitted = fit
    return trace


def decay_rate(trace, window=(1., 5.)):
    """ Least-squares slope of ``log(stable norm)`` against ``s`` over ``window``. """
    s = np.asarray(trace.times)
    norms = np.asarray(trace.stable_norm if trace.stable_norm else trace.norm_k)
    mask = (s >= window[0] - 1e-12) & (s <= window[1] + 1e-12) & (norms > 0)
    if mask.sum() < 2:
        raise ParameterError('need at least two positive samples in s = {}, got {}'.format(window, mask.sum()))
    model = LinearRegression().fit(s[mask].reshape(-1, 1), np.log(norms[mask]))
    return float(model.coef_[0])


def basin_sweep(cfg, eps_values, seeds, jobs=None):
    """ Independent nonlinear evolutions over ``eps x seeds`` in a thread pool.

    Returns:
        pandas.DataFrame: columns eps, seed, slope, stable, error
    """
    jobs = config.jobs if jobs is None else jobs
    tasks = [(eps, seed) for eps in eps_values for seed in seeds]

    def task(item):
        eps, seed = item
        run_cfg = cfg.with_values(eps=eps, seed=seed)
        try:
            trace = evolve_nonlinear(run_cfg, random_perturbation(eps, seed, even=True))
            slope = decay_rate(trace, (1., run_cfg.s_max))
            row = {'eps': eps, 'seed': seed, 'slope': slope, 'stable': slope <= -run_cfg.w0 + 0.1, 'error': ''}
        except NumericalFailure as e:
            row = {'eps': eps, 'seed': seed, 'slope': math.nan, 'stable': False, 'error': type(e).__name__}
        scan_logger.debug('[Basin {} / {}] {}'.format(eps, seed, row))
        return row

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        rows = list(executor.map(task, tasks))
    return pd.DataFrame(rows, columns=['eps', 'seed', 'slope', 'stable', 'error'])


def largest_stable_eps(frame):
    """ Largest tested ``eps`` for which every seed decayed; ``nan`` if none did. """
    stable = frame.groupby('eps')['stable'].all()
    stable = stable[stable]
    return float(stable.index.max()) if len(stable) else math.nan
