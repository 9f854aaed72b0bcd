# tests/test_expcalc.py

import numpy as np
import pytest

from analysis.coeffs import MultiplicityFunction
from analysis.errors import InvalidSpecError, PoleError
from analysis.expcalc import (
    ExpSum, a1_d_minus, a1_d_plus, a1_shift_adjoint_residual, complex_theta_closed_form, directional_derivative, divide_by_delta,
    phi_second_kind_expsum, product_of_derivatives
)
from analysis.hcseries import phi_hc
from analysis.oracles import complex_case_ncc_phi, complex_case_phi
from analysis.rootsys import ThetaSet


def test_build_merges_and_drops_terms():
    es = ExpSum.build([(1.0, (0.5,)), (2.0, (0.5,)), (1.0, (1.5,)), (-1.0, (1.5,))])
    assert len(es.terms) == 1
    assert es.terms[0][0] == 3
    assert ExpSum.build([(0.0, (1.0,))]).is_zero
    with pytest.raises(InvalidSpecError):
        ExpSum((), -1)


def test_sums_with_different_denominators_do_not_add():
    with pytest.raises(InvalidSpecError):
        ExpSum.exponential(np.array([1.0])) + phi_second_kind_expsum(1.0)


def test_directional_derivative(a2):
    lam = np.array([0.3 + 0.5j, -0.2 + 1j])
    alpha = a2.positive_roots[0]
    derived = directional_derivative(a2, ExpSum.exponential(lam), alpha)
    coefficient, exponent = derived.terms[0]
    assert coefficient == pytest.approx((lam @ alpha) / (alpha @ alpha))
    assert np.allclose(exponent, lam)
    with pytest.raises(InvalidSpecError):
        directional_derivative(a2, ExpSum.build([(1.0, lam)], 1), alpha)


def test_divide_by_delta_exact():
    # (e^{2z} - e^{-2z}) / Δ = e^{z} + e^{-z}
    quotient = divide_by_delta(ExpSum.build([(1.0, (2.0,)), (-1.0, (-2.0,))], 1))
    assert quotient.denom_power == 0
    for z in (0.3, 1.1):
        assert quotient.numerator(np.array([z])) == pytest.approx(2 * np.cosh(z), rel=1e-14)


def test_divide_by_delta_leaves_non_divisible_sums():
    es = ExpSum.build([(1.0, (0.7,)), (2.0, (-1.3,))], 1)
    assert divide_by_delta(es) == es


@pytest.mark.parametrize('t', [0.5, 1.2, 3.0])
def test_d_plus_produces_second_kind_function(a1, t):
    m = MultiplicityFunction.constant(a1, 4)
    for lam in (0.4 + 0.9j, -0.7 + 1.6j):
        shifted = a1_d_plus(4, ExpSum.exponential(np.array([lam])))
        series = phi_hc(a1, m, np.array([lam]), np.array([t]), N=80).value
        expected = lam * (lam - 1) * series
        assert abs(shifted.evaluate(a1, np.array([t])) - expected) <= 1e-8 * abs(expected)


@pytest.mark.parametrize('m,polynomial', [
    (2, lambda lam: -lam ** 2),
    (4, lambda lam: lam ** 2 * (lam ** 2 - 1)),
])
def test_shift_operators_compose_to_a_polynomial(a1, m, polynomial):
    lam = 0.3 + 1.1j
    result = a1_d_minus(m, a1_d_plus(m, ExpSum.exponential(np.array([lam]))))
    assert result.denom_power == 0
    for t in (0.5, 1.7, 3.0):
        expected = polynomial(lam) * np.exp(lam * t)
        assert abs(result.evaluate(a1, np.array([t])) - expected) <= 1e-8 * abs(expected)


def test_shift_operators_need_even_multiplicity():
    with pytest.raises(InvalidSpecError):
        a1_d_plus(3, ExpSum.exponential(np.array([0.5])))
    with pytest.raises(InvalidSpecError):
        a1_d_minus(-2, ExpSum.exponential(np.array([0.5])))


RADIUS = 2.0


def _bump(z, power):
    return (1 - (z / RADIUS) ** 2) ** power


def _bump_derivative(z, power):
    return -2 * power * z / RADIUS ** 2 * (1 - (z / RADIUS) ** 2) ** (power - 1)


def _f(z):
    return _bump(z, 4)


def _df(z):
    return _bump_derivative(z, 4)


def _g(z):
    return _bump(z, 3) * (1 + z)


def _dg(z):
    return _bump_derivative(z, 3) * (1 + z) + _bump(z, 3)


@pytest.mark.parametrize('m', [0.0, 1.0, 2.0, 3.5, 6.0])
def test_g_plus_is_adjoint_to_g_minus(a1, m):
    assert a1_shift_adjoint_residual(a1, m, _f, _df, _g, _dg, RADIUS) <= 1e-6


def test_adjoint_residual_detects_a_wrong_pairing(a1, a2):
    assert a1_shift_adjoint_residual(a1, 2.0, _f, _df, _g, lambda z: np.zeros_like(z), RADIUS) > 1e-3
    with pytest.raises(InvalidSpecError):
        a1_shift_adjoint_residual(a2, 2.0, _f, _df, _g, _dg, RADIUS)
    with pytest.raises(InvalidSpecError):
        a1_shift_adjoint_residual(a1, 2.0, _f, _df, _g, _dg, 0.0)


def test_product_of_derivatives_multiplies_by_pi(a2):
    lam = np.array([0.4 + 0.2j, 0.1 - 0.9j])
    derived = product_of_derivatives(a2, ExpSum.exponential(lam))
    alphas = a2.positive_roots
    expected = np.prod((alphas @ lam) / np.sum(alphas * alphas, axis=1))
    assert derived.terms[0][0] == pytest.approx(expected)


def test_closed_form_matches_complex_case_phi(a1, a2, dominant, rng):
    for rs, pi_rho in ((a1, 1.0), (a2, 2.0)):
        for _ in range(5):
            lam = rng.normal(size=rs.rank) + 1j * rng.normal(size=rs.rank)
            H = dominant(rs, rng.uniform(0.3, 1.5, size=rs.rank))
            closed = complex_theta_closed_form(rs, ThetaSet.full(rs.rank), lam, H)
            assert pi_rho * closed == pytest.approx(complex_case_phi(rs, lam, H), rel=1e-10)


@pytest.mark.parametrize('rank,theta,ratio', [(1, (), -2.0), (2, (0,), 8.0), (2, (), -8.0)])
def test_closed_form_matches_ncc_oracle(rank, theta, ratio, a1, a2, dominant, rng):
    rs = a1 if rank == 1 else a2
    th = ThetaSet(theta, rank)
    for _ in range(5):
        lam = rng.normal(size=rank) + 1j * rng.normal(size=rank)
        H = dominant(rs, rng.uniform(0.3, 1.5, size=rank))
        closed = complex_theta_closed_form(rs, th, lam, H)
        assert complex_case_ncc_phi(rs, th, lam, H) == pytest.approx(ratio * closed, rel=1e-10)


def test_closed_form_pole(a2):
    with pytest.raises(PoleError):
        complex_theta_closed_form(a2, ThetaSet.full(2), np.zeros(2, dtype=complex), np.array([0.5, 0.9]))
