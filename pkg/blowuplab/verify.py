# -*- coding: utf-8 -*-
"""
Acceptance suite. Checks run in registration order; the cheap algebraic ones come
first so that a broken building block is reported before the evolutions that use it.
"""
from collections import namedtuple, OrderedDict
import math
import time

import numpy as np
import pandas as pd

from . import evolve, lightcone, linop, modes, profiles
from .categories import ModeClass, VerifyLevel
from .grid import CollocationGrid, GridFunctionPair
from .logger import logger
from .run_config import EvolutionConfig, verify_evolution_config
from .utils import BlowupLabException

CheckOutcome = namedtuple('CheckOutcome', 'passed value detail')
Check = namedtuple('Check', 'name level func')

registry = OrderedDict()


def check(name, level=VerifyLevel.fast):
    def register(func):
        registry[name] = Check(name, level, func)
        return func
    return register


def _random_pairs(grid, count, seed):
    pairs = []
    for i in range(count):
        f, g = evolve.random_perturbation(1., seed + i)
        pairs.append(GridFunctionPair.from_callables(grid, f, g))
    return pairs


@check('nonlinearity_homogeneity')
def check_nonlinearity():
    grid = CollocationGrid(24)
    identity = GridFunctionPair(grid, grid.nodes, np.zeros(grid.size))
    value = evolve.nonlinearity(grid, identity)
    worst = float(np.max(np.abs(value.q2 - 1.)) + np.max(np.abs(value.q1)))
    for q in _random_pairs(grid, 100, 11):
        base = linop.norm_dblk(grid, evolve.nonlinearity(grid, q), 0)
        for sigma in (1., 0.5, 0.25):
            scaled = linop.norm_dblk(grid, evolve.nonlinearity(grid, sigma * q), 0)
            worst = max(worst, abs(scaled - sigma ** 2 * base) / max(base, 1e-300))
    return CheckOutcome(worst < 1e-12, worst, 'N((y,0)) = (0,1) and |N(sq)| = s^2 |N(q)|')


@check('profile_exactness')
def check_profiles():
    y = np.linspace(-0.95, 0.95, 50)
    worst = 0.
    for alpha in (1., 3., 8.):
        for beta in (0., math.inf):
            params = profiles.ProfileParams(alpha, beta)
            worst = max(worst, max(profiles.riccati_residual(params, v) for v in y))
    special = profiles.ProfileParams(3., 1. / 12)
    worst = max(worst, max(profiles.riccati_residual(special, v) for v in y))
    base = profiles.tildeU_eval(special, 0.)
    quadratic = max(abs(profiles.tildeU_eval(special, v) - base - 1.5 * v * v) for v in y)
    return CheckOutcome(worst < 1e-7 and quadratic < 1e-8, max(worst, quadratic),
                        'Riccati residual and quadratic profile')


@check('stationary_witness')
def check_witness():
    table = profiles.stationary_witness_table([-10., -1., 0., 1., 10.])
    inside = bool(((table['root'] > -1) & (table['root'] < 1)).all())
    worst = float(table['residual'].max())
    ends = profiles.p_c_eval(2., -1.) == -0.5 and profiles.p_c_eval(2., 1.) == 0.5
    return CheckOutcome(inside and ends and worst < 1e-12, worst, 'roots of p_c inside (-1, 1)')


@check('mode_stability')
def check_mode_stability():
    worst = 0.
    lattice_smooth = 0
    snapped = True
    for alpha in (3., 8.):
        verdicts = modes.scan_halfplane(alpha, (-0.9, 4.), (-4., 4.), (40, 40), n_max=2000)
        lattice_smooth += sum(v.smooth for v in verdicts)
        worst = max(worst, max(v.ratio_tail for v in verdicts))
        snapped = snapped and all(modes.mode_stability_verdict(alpha, lam).smooth for lam in (0., 1.))
    return CheckOutcome(lattice_smooth == 0 and snapped and worst < 1e-2, worst,
                        'no smooth lattice point, 0 and 1 terminate')


@check('spectral_picture')
def check_spectrum():
    grid = CollocationGrid(64)
    expected = sorted([ModeClass.mode_zero.value] * 2 + [ModeClass.mode_one.value])
    residual, jordan, ok = 0., 0., True
    for alpha in (1., 3., 8.):
        report = linop.assemble_and_eig(alpha, grid, 0)
        ok = ok and report.unstable_multiset() == expected
        residual = max(residual, report.max_resolved_residual())
        jordan = max(jordan, linop.jordan_block_check(alpha, grid))
    return CheckOutcome(ok and residual < 1e-6 and jordan < 1e-7, max(residual, jordan),
                        'unstable spectrum {0, 0, 1}, residuals')


@check('free_dissipativity')
def check_dissipativity():
    grid = CollocationGrid(64)
    worst = -math.inf
    for q in _random_pairs(grid, 100, 101):
        for k in (0, 1, 2):
            worst = max(worst, linop.free_dissipativity_check(grid, q, k))
    return CheckOutcome(worst <= 1e-8, worst, 'Re <L~q, q>_k + |q|_k^2 / 2 <= 0')


@check('linear_mode_laws')
def check_linear_laws():
    grid = CollocationGrid(32)
    cfg = EvolutionConfig(grid_N=32, k_norm=2, s_max=2.)
    modes_ = linop.symmetry_modes(3., grid)
    growth = evolve.evolve_linear(3., grid, modes_.f1, cfg)
    s = np.asarray(growth.times)
    worst = float(np.max(np.abs(np.asarray(growth.norm_k) / (np.exp(s) * growth.norm_k[0]) - 1)))
    drift = evolve.evolve_linear(3., grid, modes_.g0, cfg, keep_states=True)
    worst = max(worst, float(np.max(np.abs(np.asarray(drift.proj_f0) - s))))
    worst = max(worst, evolve.linear_law_deviation(3., grid, drift, g0=1.))
    mixed = evolve.evolve_linear(3., grid, modes_.f1 + modes_.g0, cfg, keep_states=True)
    worst = max(worst, evolve.linear_law_deviation(3., grid, mixed, g0=1., f1=1.))
    return CheckOutcome(worst < 1e-5, worst, 'e^s growth of f1, g0 + s f0 drift, mixed f1 + g0 states')


@check('initial_data_expansion')
def check_expansion():
    cfg = EvolutionConfig(grid_N=32, k_norm=2)
    grid = CollocationGrid(32)
    worst = math.inf
    for remainder in (_alpha_remainder, _time_remainder):
        norms = [remainder(cfg, grid, h) for h in (1e-2, 5e-3, 2.5e-3)]
        orders = [math.log2(a / b) for a, b in zip(norms, norms[1:])]
        worst = min(worst, min(orders))
    return CheckOutcome(worst >= 1.9, worst, 'O(h^2) remainder of the linearized data map')


def _alpha_remainder(cfg, grid, h):
    alpha = cfg.alpha0 + h
    data = evolve.initial_data_map(cfg, alpha, cfg.kappa0, cfg.T0, None, grid)
    linear = -h * linop.symmetry_modes(alpha, grid).g0
    return linop.norm_dblk(grid, data - linear, cfg.k_norm)


def _time_remainder(cfg, grid, h):
    T = cfg.T0 * (1 + h)
    data = evolve.initial_data_map(cfg, cfg.alpha0, cfg.kappa0, T, None, grid)
    modes_ = linop.symmetry_modes(cfg.alpha0, grid)
    linear = -cfg.alpha0 * h * modes_.f0 + h * modes_.f1
    return linop.norm_dblk(grid, data - linear, cfg.k_norm)


@check('generalized_mode_obstruction')
def check_obstruction():
    report = linop.generalized_mode_obstruction(CollocationGrid(32))
    taylor = float(np.max(np.abs(report.taylor - np.array([-1.5, -2.75, 6.75]))))
    ok = abs(report.c_log + 6.75) < 0.05 and taylor < 1e-10
    return CheckOutcome(ok, report.c_log, 'log coefficient -27/4, Taylor error {:.2e}'.format(taylor))


@check('nonlinear_decay_rate', VerifyLevel.full)
def check_decay():
    cfg = verify_evolution_config
    worst_slope, worst_shift = -math.inf, 0.
    for seed in range(5):
        run_cfg = cfg.with_values(seed=seed)
        trace = evolve.evolve_nonlinear(run_cfg, evolve.random_perturbation(run_cfg.eps, seed, even=True))
        worst_slope = max(worst_slope, evolve.decay_rate(trace, (1., 5.)))
        fit = trace.fitted
        shift = abs(fit.alpha_star - cfg.alpha0) + abs(fit.kappa_star - cfg.kappa0) + abs(fit.T_star / cfg.T0 - 1)
        worst_shift = max(worst_shift, shift)
    ok = worst_slope <= -cfg.w0 + 0.1 and worst_shift <= 10 * cfg.eps
    return CheckOutcome(ok, worst_slope, 'stable-part slope, parameter shift {:.2e}'.format(worst_shift))


@check('physical_frame', VerifyLevel.full)
def check_lightcone():
    params = profiles.ProfileParams(3., math.inf, T=1.)
    run = lightcone.lightcone_solver(params, N=2048)
    error = float(lightcone.exact_errors(run, params)['max_error'].max())
    ok = error < 1e-4 and 0.99 <= run.blowup_time <= 1.01
    return CheckOutcome(ok, error, 'closed-form match, blow-up time {:.6f}'.format(run.blowup_time))


def run_suite(level=VerifyLevel.fast, checks=None):
    """ Run the registered checks up to ``level``.

    Args:
        level (VerifyLevel): ``fast`` skips the nonlinear evolution regressions
        checks (OrderedDict, optional): Registry to run (default: the module registry)

    Returns:
        pandas.DataFrame: one row per check with columns name, passed, value, detail, seconds
    """
    level = VerifyLevel(level)
    checks = registry if checks is None else checks
    rows = []
    for entry in checks.values():
        if entry.level == VerifyLevel.full and level == VerifyLevel.fast:
            continue
        start = time.time()
        try:
            outcome = entry.func()
        except BlowupLabException as e:
            outcome = CheckOutcome(False, math.nan, '{}: {}'.format(type(e).__name__, e))
        elapsed = time.time() - start
        logger.info('[Verify] {} passed={} value={}'.format(entry.name, outcome.passed, outcome.value))
        rows.append({'name': entry.name, 'passed': bool(outcome.passed), 'value': outcome.value,
                     'detail': outcome.detail, 'seconds': elapsed})
    return pd.DataFrame(rows, columns=['name', 'passed', 'value', 'detail', 'seconds'])


def suite_exit_code(table):
    return 0 if bool(table['passed'].all()) else 2


def first_failure(table):
    failed = table[~table['passed']]
    return None if failed.empty else failed['name'].iloc[0]
