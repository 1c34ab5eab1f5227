import numpy as np
import pytest

from blowuplab import modes
from blowuplab.categories import Evidence, ExponentChoice, SingularPoint
from blowuplab.modes import EigenProblem
from blowuplab.utils import DomainError, OutOfHalfPlane, ParameterError

ALPHAS = [1., 3., 8.]
POINTS = [-0.6, -0.1, 0.35, 0.8]


@pytest.mark.parametrize('alpha', ALPHAS, ids=['alpha-1', 'alpha-3', 'alpha-8'])
def test_symmetry_eigenfunctions(alpha):
    for lam in (0., 1.):
        problem = EigenProblem(alpha, lam)
        phi = modes.mode_eigenfunction(alpha, lam)
        assert max(modes.eigen_residual(problem, phi, y) for y in POINTS) < 1e-8
    with pytest.raises(ParameterError):
        modes.mode_eigenfunction(alpha, 2.)


def test_heun_fuchs_relation():
    h = modes.heun_coefficients(EigenProblem(3., 0.4 + 0.7j))
    assert abs(h.gamma + h.delta + h.epsilon - (h.a + h.b + 1)) < 1e-14


def test_boost_round_trip():
    problem = EigenProblem(3., 0.3 + 0.4j)
    phi = modes.mode_eigenfunction(3., 1.)
    back = modes.unboosted(problem, modes.boosted(problem, phi))
    for y in POINTS:
        assert abs(back(y) - phi(y)) < 1e-13
    assert modes.lorentz_transform_eigenfunction(problem, phi, 0.2) == pytest.approx(
        complex(modes.boosted(problem, phi)(0.2)))
    with pytest.raises(DomainError):
        modes.inverse_lorentz_transform(problem, phi, 1.2)


@pytest.mark.parametrize('lam', [1., 0.5 + 0.5j, 2.3 - 1.1j], ids=['one', 'complex', 'far'])
def test_boost_maps_eigen_equation(lam):
    problem = EigenProblem(3., lam)
    psi = modes.local_solution_at_one(problem, tol=1e-15)
    for yprime in (-0.4, 0.2, 0.7):
        assert modes.transformed_residual(problem, psi, yprime) < 1e-6
    phi = modes.unboosted(problem, psi)
    for y in (-0.3, 0.5):
        assert modes.eigen_residual(problem, phi, y) < 1e-6


def test_indicial_roots():
    problem = EigenProblem(3., 0.5)
    at_zero = modes.indicial_roots(problem, SingularPoint.zero)
    assert at_zero.roots == (2.5 + 0j, 0j)
    assert not at_zero.integer_gap
    at_one = modes.indicial_roots(problem, 'one')
    assert at_one.roots == (0j, -1.5 + 0j)
    assert modes.indicial_roots(EigenProblem(3., 1.), SingularPoint.zero).integer_gap


@pytest.mark.parametrize('center, choice', [(c, e) for c in SingularPoint for e in ExponentChoice],
                         ids=['zero-plus', 'zero-minus', 'one-plus', 'one-minus'])
def test_frobenius_recurrence(center, choice):
    problem = EigenProblem(3., 0.4 + 0.3j)
    series = modes.frobenius_series(problem, center, choice, 40)
    assert series.coeffs[0] == 1
    assert modes.frobenius_recurrence_residual(problem, series) < 1e-12
    assert 0.5 < series.radius_estimate < 2


def test_frobenius_matches_hypergeometric():
    problem = EigenProblem(3., 0.4 + 0.3j)
    series = modes.frobenius_series(problem, SingularPoint.one, ExponentChoice.plus, 200)
    yprime = 0.5
    x = (1 - yprime) / 2.
    partial = np.polyval(series.coeffs[::-1], x)
    assert abs(partial - modes.local_solution_at_one(problem)(yprime)) < 1e-10


def test_frobenius_polynomial_case():
    series = modes.frobenius_series(EigenProblem(3., 1.), SingularPoint.one, ExponentChoice.plus, 10)
    assert series.radius_estimate == float('inf')
    assert np.all(series.coeffs[1:] == 0)


def test_frobenius_degenerate_cases():
    with pytest.raises(modes.LogCase):
        modes.frobenius_series(EigenProblem(3., 3.), SingularPoint.zero, ExponentChoice.minus, 10)
    with pytest.raises(modes.ResonantDivision):
        modes.frobenius_series(EigenProblem(3., 1. + 1e-10), SingularPoint.zero, ExponentChoice.minus, 10)
    with pytest.raises(ParameterError):
        modes.frobenius_series(EigenProblem(3., 0.5), SingularPoint.zero, ExponentChoice.plus, 1)


@pytest.mark.parametrize('alpha', ALPHAS, ids=['alpha-1', 'alpha-3', 'alpha-8'])
def test_symmetry_modes_terminate(alpha):
    for lam in (0., 1., 1e-12):
        verdict = modes.mode_stability_verdict(alpha, lam)
        assert verdict.smooth
        assert verdict.evidence == Evidence.series_terminates
        assert verdict.ratio_tail == 0.0


def test_generic_lambda_not_smooth():
    verdict = modes.mode_stability_verdict(3., 0.5 + 1j)
    assert not verdict.smooth
    assert verdict.evidence == Evidence.ratio_limit
    assert verdict.ratio_tail < 1e-2
    far = modes.mode_stability_verdict(3., 40., n_max=100000)
    assert not far.smooth


def test_verdict_validation():
    with pytest.raises(OutOfHalfPlane):
        modes.mode_stability_verdict(3., -1.)
    with pytest.raises(ParameterError):
        modes.mode_stability_verdict(0., 0.5)
    with pytest.raises(ParameterError):
        modes.mode_stability_verdict(3., 0.5 + 1j, n_max=99)
    with pytest.raises(ParameterError):
        EigenProblem(-1., 0.5)


def test_scan_halfplane():
    verdicts = modes.scan_halfplane(3., (-0.9, 3.), (-3., 3.), (5, 4), jobs=1)
    assert len(verdicts) == 20
    assert not any(v.smooth for v in verdicts)
    assert verdicts[0].lam == complex(-0.9, -3.)
    frame = modes.scan_to_frame(verdicts)
    assert list(frame.columns) == ['re_lambda', 'im_lambda', 'smooth', 'evidence', 'ratio_tail']
    assert len(frame) == 20
    with pytest.raises(OutOfHalfPlane):
        modes.scan_halfplane(3., (-1., 1.), (-1., 1.), (2, 2))
    with pytest.raises(ParameterError):
        modes.scan_halfplane(3., (0., 1.), (0., 1.), (2, 2), n_max=50)


def test_heun_parameters():
    h = modes.heun_coefficients(EigenProblem(3., 1.))
    assert (h.gamma, h.delta, h.d, h.a, h.b, h.c, h.epsilon) == (-1, 3, -0.5, 1, 2, -1, 2)
    assert modes.heun_coefficients(EigenProblem(3., 0.)).c == 0
    h = modes.heun_coefficients(EigenProblem(8., 2.))
    assert (h.gamma, h.delta) == (-1, 5)


def test_scan_snaps_symmetry_eigenvalues():
    verdicts = modes.scan_halfplane(3., (0., 1.), (0., 1.), (2, 1), jobs=1)
    assert [v.lam for v in verdicts] == [0j, 1 + 0j]
    assert all(v.smooth for v in verdicts)
    single = modes.scan_halfplane(3., (2., 3.), (0., 1.), (1, 1), jobs=1)
    assert len(single) == 1 and not single[0].smooth
