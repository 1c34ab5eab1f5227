# -*- coding: utf-8 -*-
"""
Physical-frame solver for ``u_tt - u_xx = (u_x)^2`` on the backward light cone
``|x - x0| <= T - t``.

The first-order variables ``w = u_t``, ``v = u_x`` are carried as the characteristic
combinations ``R = w + v`` (moving left) and ``S = w - v`` (moving right), both sourced
by ``v^2``. With ``dt = dx`` each characteristic lands on a node, and the cone loses
exactly one node on each side per step, so no boundary data is ever needed.
"""
from collections import namedtuple
import math

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline
from sklearn.linear_model import LinearRegression

from .logger import logger
from .profiles import dtildeU_eval, tildeU_eval
from .utils import NumericalFailure, ParameterError


class CFLViolation(NumericalFailure):
    pass


class NonFiniteState(NumericalFailure):
    pass


LightconeState = namedtuple('LightconeState', 't x_nodes u u_t')
LightconeRun = namedtuple('LightconeRun', 'states history blowup_time alpha_estimate')
SelfSimilarSnapshot = namedtuple('SelfSimilarSnapshot', 's y U')


def _exact_data(params, x):
    y = np.clip((x - params.x0) / params.T, -1., 1.)
    u = np.array([tildeU_eval(params, v) for v in y])
    h = dtildeU_eval(params, y)
    return u, (params.alpha + y * h) / params.T, h / params.T


def _step(x, u, r, s, dt):
    """ One cone-tracking step; returns the state on ``x[1:-1]``. """
    v = 0.5 * (r - s)
    w = 0.5 * (r + s)
    src_r = v[2:] ** 2
    src_s = v[:-2] ** 2
    r_pred = r[2:] + dt * src_r
    s_pred = s[:-2] + dt * src_s
    v_pred = 0.5 * (r_pred - s_pred)
    r_new = r[2:] + 0.5 * dt * (src_r + v_pred ** 2)
    s_new = s[:-2] + 0.5 * dt * (src_s + v_pred ** 2)
    u_new = u[1:-1] + 0.5 * dt * (w[1:-1] + 0.5 * (r_new + s_new))
    return x[1:-1], u_new, r_new, s_new


def _refine(x, *fields):
    """ Double the resolution on the same interval with cubic splines. """
    fine = np.linspace(x[0], x[-1], 2 * (len(x) - 1) + 1)
    return (fine,) + tuple(CubicSpline(x, f)(fine) for f in fields)


def lightcone_solver(params, f=None, g=None, N=2048, courant=1., s_max=None, sample_every=64):
    """ Evolve profile data plus a perturbation inside the light cone of ``(T, x0)``.

    Args:
        params (ProfileParams): Profile whose data at ``t = 0`` are perturbed
        f (callable, optional): Perturbation of ``u(0, x)``, function of ``x``
        g (callable, optional): Perturbation of ``u_t(0, x)``, function of ``x``
        N (int, optional): Initial number of cells across the cone, even
        courant (float, optional): ``dt / dx``; the cone-tracking stencil needs exactly ``1``
        s_max (float, optional): Stop at ``t = T (1 - exp(-s_max))`` (default: ``T - t = 1e-2 T``)
        sample_every (int, optional): Steps between stored states

    Returns:
        LightconeRun: stored states, a per-step history table, and the blow-up time and rate
        fitted over the last decade of ``T - t``

    Raises:
        CFLViolation: If ``courant > 1``
        NonFiniteState: If the solution stops being finite
    """
    if courant > 1:
        raise CFLViolation('courant number {} exceeds 1: the domain of dependence leaves the cone'.format(courant))
    if courant != 1:
        raise ParameterError('the cone-tracking stencil advances one cell per step, courant must be 1')
    if N < 16 or N % 2:
        raise ParameterError('N must be an even number >= 16, got {}'.format(N))
    s_max = math.log(100.) if s_max is None else float(s_max)
    T = params.T
    tau_end = T * math.exp(-s_max)

    x = np.linspace(params.x0 - T, params.x0 + T, N + 1)
    u, w, v = _exact_data(params, x)
    if f is not None:
        fx = np.asarray(f(x), dtype=float)
        u = u + fx
        v = v + np.gradient(fx, x, edge_order=2)
    if g is not None:
        w = w + np.asarray(g(x), dtype=float)
    r, s = w + v, w - v

    t = 0.
    dx = x[1] - x[0]
    states = [LightconeState(t, x.copy(), u.copy(), 0.5 * (r + s))]
    history = {'t': [t], 'max_ut': [float(np.max(np.abs(w)))], 'u_center': [float(u[len(u) // 2])]}
    step = 0
    while T - (t + dx) >= tau_end * (1 - 1e-12):
        x, u, r, s = _step(x, u, r, s, dx)
        t += dx
        step += 1
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(r)) and np.all(np.isfinite(s))):
            msg = 'non-finite solution at t = {:.6f} (T - t = {:.3e})'.format(t, T - t)
            logger.error(msg)
            raise NonFiniteState(msg)
        ut = 0.5 * (r + s)
        history['t'].append(t)
        history['max_ut'].append(float(np.max(np.abs(ut))))
        history['u_center'].append(float(u[len(u) // 2]))
        if step % sample_every == 0:
            states.append(LightconeState(t, x.copy(), u.copy(), ut))
        if len(x) - 1 < N // 2:
            x, u, r, s = _refine(x, u, r, s)
            dx = x[1] - x[0]
            logger.debug('[Lightcone] refined to {} nodes at T - t = {:.3e}'.format(len(x), T - t))
    states.append(LightconeState(t, x.copy(), u.copy(), 0.5 * (r + s)))

    history = pd.DataFrame(history)
    blowup_time, alpha_estimate = fit_blowup_time(history, T - tau_end * 10)
    logger.info('[Lightcone] {} steps, T* = {:.6f}, alpha* = {:.6f}'.format(step, blowup_time, alpha_estimate))
    return LightconeRun(states, history, blowup_time, alpha_estimate)


def fit_blowup_time(history, t_start):
    """ Blow-up time from ``1 / max|u_t|`` linear in ``t`` and rate from ``u(t, x0)`` linear in
    ``-log(T* - t)``, both on the samples with ``t >= t_start``. """
    window = history[history['t'] >= t_start]
    if len(window) < 3:
        raise ParameterError('fit window holds {} samples, need 3'.format(len(window)))
    t = window['t'].values.reshape(-1, 1)
    inverse = LinearRegression().fit(t, 1. / window['max_ut'].values)
    blowup_time = float(-inverse.intercept_ / inverse.coef_[0])
    if not blowup_time > window['t'].values[-1]:
        raise ParameterError('fitted blow-up time {} precedes the last sample'.format(blowup_time))
    log_tau = -np.log(blowup_time - window['t'].values).reshape(-1, 1)
    rate = LinearRegression().fit(log_tau, window['u_center'].values)
    return blowup_time, float(rate.coef_[0])


def self_similar_snapshot(state, params):
    """ ``(s, y, U)`` with ``U(s, y) = u(t, x)``; ``U - alpha s`` approaches the profile. """
    tau = params.T - state.t
    return SelfSimilarSnapshot(-math.log(tau / params.T), (state.x_nodes - params.x0) / tau, state.u)


def exact_errors(run, params):
    """ Max-norm distance of each stored state to the unperturbed closed form. """
    rows = []
    for state in run.states:
        tau = params.T - state.t
        y = np.clip((state.x_nodes - params.x0) / tau, -1., 1.)
        exact = -params.alpha * math.log(tau / params.T) + np.array([tildeU_eval(params, v) for v in y])
        rows.append({'t': state.t, 'tau': tau, 'max_error': float(np.max(np.abs(state.u - exact)))})
    return pd.DataFrame(rows)
