import numpy as np
import pytest

from blowuplab import linop
from blowuplab.categories import ModeClass
from blowuplab.grid import CollocationGrid, GridFunctionPair
from blowuplab.utils import DimensionMismatch, ParameterError, UnderResolved
from .utils import random_pair

ALPHAS = [1., 3., 8.]
grid32 = CollocationGrid(32)


@pytest.fixture(scope='module')
def grid64():
    return CollocationGrid(64)


@pytest.mark.parametrize('alpha', ALPHAS, ids=['alpha-1', 'alpha-3', 'alpha-8'])
def test_symmetry_modes_eigen_relations(grid64, alpha):
    modes = linop.symmetry_modes(alpha, grid64)
    assert linop.norm_dblk(grid64, linop.apply_L_alpha(alpha, grid64, modes.f0), 0) < 1e-12
    assert linop.norm_dblk(grid64, linop.apply_L_alpha(alpha, grid64, modes.f1) - modes.f1, 0) < 1e-7
    assert linop.norm_dblk(grid64, linop.apply_L_alpha(alpha, grid64, modes.g0) - modes.f0, 0) < 1e-7
    assert linop.jordan_block_check(alpha, grid64) < 1e-7


@pytest.mark.parametrize('alpha', ALPHAS, ids=['alpha-1', 'alpha-3', 'alpha-8'])
def test_eigen_relation_residuals_decay_spectrally(alpha):
    def residuals(N):
        grid = CollocationGrid(N)
        modes = linop.symmetry_modes(alpha, grid)
        return (linop.norm_dblk(grid, linop.apply_L_alpha(alpha, grid, modes.f1) - modes.f1, 0),
                linop.norm_dblk(grid, linop.apply_L_alpha(alpha, grid, modes.g0) - modes.f0, 0))

    # each doubling gains two digits until the roundoff floor of the collocated derivatives
    levels = [residuals(N) for N in (16, 32, 64)]
    for coarse, fine in zip(levels, levels[1:]):
        for c, f in zip(coarse, fine):
            assert f < max(1e-2 * c, 1e-7)


def test_matrix_matches_operator():
    q = random_pair(grid32, 4)
    matrix = linop.assemble_matrix(3., grid32)
    applied = linop.apply_L_alpha(3., grid32, q)
    assert np.max(np.abs(matrix.dot(q.to_vector()) - applied.to_vector())) < 1e-10
    assert matrix.shape == (66, 66)


def test_potential_derivative():
    y, h = 0.3, 1e-5
    for order in (1, 2, 3):
        fd = (linop.potential_derivative(3., y + h, order) - linop.potential_derivative(3., y - h, order)) / (2 * h)
        assert abs(fd - linop.potential_derivative(3., y, order + 1)) < 1e-6
    assert linop.potential_derivative(3., 0., 1) == -1.5
    with pytest.raises(ParameterError):
        linop.potential_derivative(3., 0., 0)


def test_inner_products_on_linear_state():
    y = grid32.nodes
    q = GridFunctionPair(grid32, y, np.zeros(grid32.size))
    assert linop.inner_dblk(grid32, q, q, 1) == pytest.approx(2. / 3, abs=1e-13)
    assert linop.inner_k(grid32, q, q, 0) == pytest.approx(3., abs=1e-13)
    assert linop.norm_k(grid32, q, 2) == pytest.approx(3 ** 0.5, abs=1e-12)
    assert linop.sobolev_norm(grid32, q, 0) ** 2 == pytest.approx(2 + 2. / 3, abs=1e-12)


def test_inner_products_hermitian():
    q = random_pair(grid32, 1) + 1j * random_pair(grid32, 2)
    r = random_pair(grid32, 3)
    for k in (0, 2):
        assert abs(linop.inner_k(grid32, q, r, k) - np.conj(linop.inner_k(grid32, r, q, k))) < 1e-12
        assert abs(linop.inner_dblk(grid32, q, r, k) - np.conj(linop.inner_dblk(grid32, r, q, k))) < 1e-12
        assert linop.inner_k(grid32, q, q, k).real >= 0


def test_inner_product_validation():
    q = random_pair(grid32, 1)
    with pytest.raises(UnderResolved):
        linop.inner_k(grid32, q, q, 16)
    with pytest.raises(ParameterError):
        linop.norm_dblk(grid32, q, -1)
    with pytest.raises(DimensionMismatch):
        linop.inner_k(grid32, q, random_pair(CollocationGrid(16), 1), 0)


@pytest.mark.parametrize('k', [0, 1, 2], ids=['k0', 'k1', 'k2'])
def test_free_dissipativity(k):
    worst = max(linop.free_dissipativity_check(grid32, random_pair(grid32, seed), k) for seed in range(20))
    assert worst <= 1e-8


@pytest.mark.parametrize('k', [1, 2, 3], ids=['k1', 'k2', 'k3'])
def test_commutator_identity(k):
    for seed in (5, 6):
        q = random_pair(grid32, seed)
        assert linop.commutator_check(3., grid32, q, k) < 1e-6


def test_solve_free_modified():
    f = random_pair(grid32, 9)
    q = linop.solve_free_modified(grid32, f)
    residual = linop.apply_free_modified(grid32, q) + f
    assert linop.norm_dblk(grid32, residual, 0) < 1e-7


@pytest.mark.parametrize('alpha', ALPHAS, ids=['alpha-1', 'alpha-3', 'alpha-8'])
def test_spectrum(grid64, alpha):
    report = linop.assemble_and_eig(alpha, grid64, 0)
    assert report.unstable_multiset() == ['mode_one', 'mode_zero', 'mode_zero']
    assert report.count(ModeClass.mode_one) == 1
    assert report.max_resolved_residual() < 1e-6
    assert report.mode_one_distance < 1e-6
    frame = report.to_frame()
    assert len(frame) == 2 * grid64.size
    assert list(frame.columns) == ['re', 'im', 'residual', 'class', 'resolved']
    payload = linop.spectral_report_json(report)
    assert payload['N'] == 64 and payload['k_norm'] == 0
    assert len(payload['eigenvalues']) == 130


def test_spectrum_residual_norm_follows_k():
    low = linop.assemble_and_eig(3., grid32, 0)
    high = linop.assemble_and_eig(3., grid32, 4)
    assert np.allclose(low.eigenvalues, high.eigenvalues)
    assert high.k_norm == 4
    assert not np.allclose(low.residuals, high.residuals, rtol=1e-3, atol=0.)
    # derivative orders only add to the norm
    q = random_pair(grid32, 7)
    assert linop.norm_dblk(grid32, q, 4) > linop.norm_dblk(grid32, q, 0)
    with pytest.raises(UnderResolved):
        linop.assemble_and_eig(3., grid32, 16)


def test_spectrum_size_limit():
    with pytest.raises(ParameterError):
        linop.assemble_and_eig(3., CollocationGrid(257))


def test_spectral_projector(grid64):
    projector = linop.SpectralProjector(3., grid64)
    modes = linop.symmetry_modes(3., grid64)
    assert np.allclose(projector.coefficients(modes.g0), [1, 0, 0], atol=1e-8)
    assert np.allclose(projector.coefficients(modes.f1), [0, 0, 1], atol=1e-8)
    combo = 2 * modes.f0 - modes.g0
    assert linop.norm_dblk(grid64, projector.stable_part(combo), 0) < 1e-8
    q = random_pair(grid64, 12)
    stable = projector.stable_part(q)
    assert np.allclose(projector.coefficients(stable), 0, atol=1e-8)


def test_coercivity_spot_check(grid64):
    frame = linop.coercivity_spot_check(3., grid64, 2, samples=4)
    assert len(frame) == 4
    assert np.all(np.isfinite(frame['ratio']))


def test_obstruction():
    taylor = linop.kernel_taylor_coefficients()
    assert np.max(np.abs(taylor - np.array([-1.5, -2.75, 6.75]))) < 1e-10
    report = linop.generalized_mode_obstruction(grid32)
    assert abs(report.c_log + 6.75) < 0.05
    assert report.g_residual < 1e-10
    y = grid32.nodes[1:]
    assert np.allclose(linop.obstruction_source(y),
                       linop._obstruction_kernel(y) / ((1 - y) * (2 + y) ** 2), atol=1e-12)
