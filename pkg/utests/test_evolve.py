import math

import numpy as np
import pytest
from scipy import linalg

from blowuplab import evolve, linop
from blowuplab.grid import CollocationGrid, GridFunctionPair
from blowuplab.run_config import EvolutionConfig, Perturbation, quick_evolution_config
from blowuplab.utils import HypothesisViolation, Instability, ParameterError
from .utils import random_pair

grid32 = CollocationGrid(32)
linear_config = EvolutionConfig(grid_N=32, k_norm=2, s_max=2.)


def test_rk4_is_fourth_order():
    def error(dt):
        v = np.array([1.])
        for _ in range(int(round(1 / dt))):
            v = evolve.rk4_step(lambda x: -x, v, dt)
        return abs(v[0] - math.exp(-1))
    assert math.log2(error(0.1) / error(0.05)) > 3.8


def test_nonlinearity():
    y = grid32.nodes
    value = evolve.nonlinearity(grid32, GridFunctionPair(grid32, y, np.zeros(grid32.size)))
    assert np.max(np.abs(value.q1)) == 0
    assert np.max(np.abs(value.q2 - 1)) < 1e-12
    q = random_pair(grid32, 3)
    base = linop.norm_dblk(grid32, evolve.nonlinearity(grid32, q), 0)
    for sigma in (0.5, 0.25):
        scaled = linop.norm_dblk(grid32, evolve.nonlinearity(grid32, sigma * q), 0)
        assert abs(scaled - sigma ** 2 * base) < 1e-12 * base


def test_nonlinearity_lipschitz():
    q, r = random_pair(grid32, 1, 1e-2), random_pair(grid32, 2, 1e-2)
    ratio = evolve.nonlinearity_lipschitz(grid32, q, r, 1)
    assert 0 < ratio < 1e3
    assert evolve.nonlinearity_lipschitz(grid32, q, q) == 0.


@pytest.mark.parametrize('k', [0, 1, 2], ids=['k0', 'k1', 'k2'])
def test_nonlinearity_lipschitz_under_refinement(k):
    ratios = []
    for N in (16, 32, 64):
        grid = CollocationGrid(N)
        ratios.append(evolve.nonlinearity_lipschitz(grid, random_pair(grid, 1, 1e-2), random_pair(grid, 2, 1e-2), k))
    assert max(ratios) / min(ratios) - 1 < 1e-5


def test_cfl_dt():
    assert evolve.cfl_dt(grid32) == pytest.approx(0.25 * (1 - math.cos(math.pi / 32)))
    assert linear_config.dt == evolve.cfl_dt(grid32)


def test_gram_dual_basis():
    dual = evolve.gram_dual_basis(3., grid32, 2)
    assert np.allclose(dual.gram, dual.gram.T)
    pairing = np.array([[linop.inner_dblk(grid32, b, d, 2).real for d in dual.duals] for b in dual.basis])
    assert np.allclose(pairing, np.eye(3), atol=1e-10)


def test_linear_mode_laws():
    modes = linop.symmetry_modes(3., grid32)
    growth = evolve.evolve_linear(3., grid32, modes.f1, linear_config)
    s = np.asarray(growth.times)
    assert s[0] == 0. and s[-1] == pytest.approx(2.)
    assert np.max(np.abs(np.asarray(growth.norm_k) / (np.exp(s) * growth.norm_k[0]) - 1)) < 1e-5
    drift = evolve.evolve_linear(3., grid32, modes.g0, linear_config, keep_states=True)
    assert np.max(np.abs(np.asarray(drift.proj_f0) - s)) < 1e-5
    assert np.max(np.abs(np.asarray(drift.proj_g0) - 1)) < 1e-5
    assert len(drift.states) == len(drift)
    assert evolve.linear_law_deviation(3., grid32, drift, g0=1.) < 1e-5
    still = evolve.evolve_linear(3., grid32, modes.f0, linear_config)
    assert np.max(np.abs(np.asarray(still.norm_k) - still.norm_k[0])) < 1e-8
    frame = evolve.trace_to_frame(still)
    assert list(frame.columns) == ['s', 'norm_k', 'proj_f0', 'proj_f1', 'proj_g0']


@pytest.mark.parametrize('alpha', [1., 3., 8.], ids=['alpha-1', 'alpha-3', 'alpha-8'])
def test_linear_mixed_mode_law(alpha):
    modes = linop.symmetry_modes(alpha, grid32)
    trace = evolve.evolve_linear(alpha, grid32, modes.f1 + modes.g0, linear_config, keep_states=True)
    assert evolve.linear_law_deviation(alpha, grid32, trace, g0=1., f1=1.) < 1e-5
    # the law is not satisfied by the wrong combination
    assert evolve.linear_law_deviation(alpha, grid32, trace, f1=1.) > 1e-2


def test_linear_law_needs_states():
    trace = evolve.evolve_linear(3., grid32, linop.symmetry_modes(3., grid32).f0, linear_config)
    with pytest.raises(ParameterError):
        evolve.linear_law_deviation(3., grid32, trace, f0=1.)


def test_rk4_order_on_collocated_system():
    grid = CollocationGrid(8)
    eigenvalues, vectors = linalg.eig(linop.assemble_matrix(3., grid))
    i = int(np.argmin(np.abs(eigenvalues - 1)))
    q0 = GridFunctionPair.from_vector(grid, vectors[:, i])

    def error(dt):
        cfg = EvolutionConfig(grid_N=8, k_norm=0, s_max=1., dt=dt, sample_ds=1.)
        trace = evolve.evolve_linear(3., grid, q0, cfg, keep_states=True)
        exact = np.exp(eigenvalues[i] * trace.times[-1]) * vectors[:, i]
        return np.max(np.abs(trace.states[-1].to_vector() - exact))

    dt = evolve.cfl_dt(grid)
    coarse, fine = error(dt), error(dt / 2)
    assert 0 < fine < coarse
    assert math.log2(coarse / fine) > 3.5


def test_linear_instability_on_large_step():
    cfg = EvolutionConfig(grid_N=24, k_norm=2, dt=0.5, s_max=5., sample_ds=0.5)
    grid = CollocationGrid(24)
    with pytest.raises(Instability):
        evolve.evolve_linear(3., grid, random_pair(grid, 0), cfg)


def test_initial_data_map():
    cfg = EvolutionConfig(grid_N=32, k_norm=2)
    zero = evolve.initial_data_map(cfg, cfg.alpha0, cfg.kappa0, cfg.T0, None, grid32)
    assert np.max(np.abs(zero.to_vector())) < 1e-14
    shifted = evolve.initial_data_map(cfg, cfg.alpha0, cfg.kappa0 + 0.5, cfg.T0, None, grid32)
    assert np.allclose(shifted.q1, -0.5) and np.allclose(shifted.q2, 0)
    with pytest.raises(HypothesisViolation):
        evolve.initial_data_map(cfg, 3., 0., 2., None, grid32)


@pytest.mark.parametrize('which', [Perturbation.ModeF0, Perturbation.ModeF1, Perturbation.ModeG0],
                         ids=['f0', 'f1', 'g0'])
def test_mode_perturbation_images(which):
    cfg = EvolutionConfig(grid_N=32, k_norm=2, eps=1e-3)
    data = evolve.initial_data_map(cfg, 3., 0., 1., evolve.mode_perturbation(cfg, which), grid32)
    expected = 1e-3 * getattr(linop.symmetry_modes(3., grid32), which)
    assert np.max(np.abs((data - expected).to_vector())) < 1e-14


def test_random_perturbation():
    f, g = evolve.random_perturbation(1e-3, 7, even=True)
    x = np.linspace(0., 1., 5)
    assert np.allclose(f(x), f(-x)) and np.allclose(g(x), g(-x))
    again, _ = evolve.random_perturbation(1e-3, 7, even=True)
    assert np.array_equal(f(x), again(x))
    other, _ = evolve.random_perturbation(1e-3, 8, even=True)
    assert not np.array_equal(f(x), other(x))
    assert evolve.build_perturbation(quick_evolution_config, Perturbation.Zero) is None


def test_fit_modulation_f0():
    cfg = EvolutionConfig(grid_N=32, k_norm=2, eps=1e-4)
    fit = evolve.fit_modulation(cfg, evolve.mode_perturbation(cfg, Perturbation.ModeF0), grid=grid32)
    assert fit.alpha_star == pytest.approx(3., abs=1e-12)
    assert fit.kappa_star == pytest.approx(1e-4, abs=1e-10)
    assert fit.T_star == pytest.approx(1., abs=1e-12)


def test_fit_modulation_f1():
    cfg = EvolutionConfig(grid_N=32, k_norm=2, eps=1e-4)
    fit = evolve.fit_modulation(cfg, evolve.mode_perturbation(cfg, Perturbation.ModeF1), grid=grid32)
    assert fit.residual < 1e-8
    assert fit.alpha_star == pytest.approx(3., abs=1e-6)
    assert fit.T_star == pytest.approx(1 - 1e-4, abs=1e-6)
    assert fit.kappa_star == pytest.approx(3e-4, abs=1e-6)


def test_nonlinear_moments():
    s = np.linspace(0., 2., 41)
    c = np.column_stack([np.ones_like(s), np.ones_like(s), np.exp(s)])
    moments = evolve.nonlinear_moments(s, c)
    assert moments == pytest.approx([2., 0., 2.], abs=1e-12)
    assert np.array_equal(evolve.nonlinear_moments([0.], [[1., 1., 1.]]), np.zeros(3))


def test_decay_rate():
    trace = evolve.EvolutionTrace()
    for s in np.linspace(0., 5., 51):
        trace.append(s, 1., (0., 0., 0.), 2 * math.exp(-0.9 * s))
    assert evolve.decay_rate(trace, (1., 5.)) == pytest.approx(-0.9, abs=1e-10)
    assert 'stable_norm' in trace.to_frame().columns


def test_nonlinear_evolution_decays():
    cfg = quick_evolution_config.with_values(eps=1e-4, seed=3)
    trace = evolve.evolve_nonlinear(cfg, evolve.build_perturbation(cfg, Perturbation.Random))
    assert trace.fitted is not None
    assert trace.seed == 3
    assert abs(trace.fitted.alpha_star - 3.) < 1e-2
    assert evolve.decay_rate(trace, (1., 2.)) < -0.5
    assert trace.summary()['samples'] == len(trace)


def test_basin_sweep():
    frame = evolve.basin_sweep(quick_evolution_config, [1e-4], [0, 1], jobs=1)
    assert len(frame) == 2
    assert list(frame.columns) == ['eps', 'seed', 'slope', 'stable', 'error']
    if frame['stable'].all():
        assert evolve.largest_stable_eps(frame) == 1e-4
