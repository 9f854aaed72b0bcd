# tests/test_coeffs.py

import numpy as np
import pytest
from scipy.special import gamma

from analysis.coeffs import (
    MultiplicityFunction, c_hc, c_minus_over_n_minus, c_pi0_minus, c_pi0_minus_even_reciprocal, c_theta, c_theta_minus, c_theta_plus,
    d_theta, delta_density, e_theta_minus, e_theta_plus, n_theta_minus, pi_poly, rho, weyl_denominator
)
from analysis.errors import InvalidSpecError
from analysis.rootsys import ThetaSet, build_root_system, parabolic


def test_multiplicity_constructors(b2):
    m = MultiplicityFunction.by_length(b2, 2, 1)
    long_root = b2.positive_roots[b2.root_index(b2.simple_roots[0])]
    short_root = b2.simple_roots[1]
    assert m.value_for(long_root) == 2
    assert m.value_for(short_root) == 1
    assert not m.is_even
    assert m.label() == '2/1'
    assert MultiplicityFunction.constant(b2, 4).is_even
    assert MultiplicityFunction.constant(b2, 0).is_zero
    with pytest.raises(InvalidSpecError):
        MultiplicityFunction.constant(b2, -1)


def test_simply_laced_has_one_length(a2):
    with pytest.raises(InvalidSpecError):
        MultiplicityFunction.by_length(a2, 2, 4)
    assert MultiplicityFunction.by_length(a2, 2).uniform() == 2


def test_rho_and_delta(a1, m2_a1):
    assert rho(a1, m2_a1) == pytest.approx([1.0])
    t = np.array([0.3, 1.2])
    np.testing.assert_allclose(delta_density(a1, m2_a1, t[:, None]), (2 * np.sinh(t)) ** 2, rtol=1e-14)
    np.testing.assert_allclose(weyl_denominator(a1, t[:, None]), 2 * np.sinh(t), rtol=1e-14)


def test_delta_is_one_for_zero_multiplicity(a2):
    m = MultiplicityFunction.constant(a2, 0)
    assert delta_density(a2, m, np.array([0.4, -0.2])) == pytest.approx(1.0)


@pytest.mark.parametrize('family,rank,m', [('A', 1, 1.0), ('A', 1, 2.0), ('A', 1, 4.0), ('A', 2, 2.0),
                                           ('A', 2, 1.0), ('B', 2, 2.0), ('G2', 2, 2.0)])
def test_c_hc_is_normalized_at_rho(family, rank, m):
    rs = build_root_system(family, rank)
    mult = MultiplicityFunction.constant(rs, m)
    value = c_hc(rs, mult, rho(rs, mult))
    assert not value.is_pole
    assert abs(value.value - 1) <= 1e-12


def test_c_hc_nonuniform_multiplicity_normalized(b2):
    mult = MultiplicityFunction.by_length(b2, 2, 1)
    assert abs(c_hc(b2, mult, rho(b2, mult)).value - 1) <= 1e-12


def test_complex_case_c_function(a2, m2_a2, rng):
    two_rho = 2 * rho(a2, m2_a2)
    assert abs(c_hc(a2, m2_a2, two_rho).value - 0.125) <= 1e-10
    rho_vec = rho(a2, m2_a2)
    for _ in range(5):
        lam = rng.normal(size=2) + 1j * rng.normal(size=2)
        expected = pi_poly(a2, rho_vec) / pi_poly(a2, lam)
        assert c_hc(a2, m2_a2, lam).value == pytest.approx(expected, rel=1e-10)


def test_rankone_c_theta_even(a1, m2_a1, full_a1, empty_a1):
    lam = np.array([0.4 + 0.9j])
    assert c_theta_plus(a1, m2_a1, full_a1, lam).value == pytest.approx(1 / lam[0])
    assert c_theta_minus(a1, m2_a1, empty_a1, lam).value == pytest.approx(-1 / lam[0])
    assert c_theta_plus(a1, m2_a1, empty_a1, lam).value == pytest.approx(1.0)
    assert c_theta_minus(a1, m2_a1, full_a1, lam).value == pytest.approx(1.0)
    assert d_theta(a1, m2_a1, empty_a1) == 1.0
    assert d_theta(a1, m2_a1, full_a1) == 0.0


def test_product_and_gamma_forms_agree(a2, rng):
    m = MultiplicityFunction.constant(a2, 4)
    th = ThetaSet((1,), 2)
    for _ in range(10):
        lam = rng.normal(size=2) + 1j * rng.normal(size=2)
        for function in (c_theta_plus, c_theta_minus):
            product = function(a2, m, th, lam, form='product').value
            gamma = function(a2, m, th, lam, form='gamma').value
            assert product == pytest.approx(gamma, rel=1e-10)


def test_c_theta_minus_pole(a1, m2_a1, empty_a1):
    value = c_theta_minus(a1, m2_a1, empty_a1, np.array([0j]))
    assert value.is_pole
    assert c_theta(a1, m2_a1, empty_a1, np.array([0j])).is_pole


@pytest.mark.parametrize('m', [1.0, 2.0, 3.0])
def test_c_theta_minus_is_w_theta_invariant(a2, m, rng):
    mult = MultiplicityFunction.constant(a2, m)
    th = ThetaSet((0,), 2)
    subgroup = parabolic(a2, th).subgroup
    for _ in range(100):
        lam = rng.normal(size=2) + 1j * rng.normal(size=2)
        reference = c_theta_minus(a2, mult, th, lam).value
        for w in subgroup:
            moved = c_theta_minus(a2, mult, th, w.act(lam)).value
            assert abs(moved - reference) <= 1e-10 * abs(reference)


def test_regularizing_factors_cancel_poles(a1):
    m = MultiplicityFunction.constant(a1, 4)
    empty = ThetaSet.empty(1)
    lam = np.array([0.3 + 0.2j])
    # e_Θ⁻ c_Θ⁻ is the polynomial (-1)^d Π_{k≥1}(λ_α - k)
    product = e_theta_minus(a1, m, empty, lam) * c_theta_minus(a1, m, empty, lam).value
    assert product == pytest.approx(lam[0] - 1, rel=1e-12)
    assert e_theta_plus(a1, m, ThetaSet.full(1), lam) == pytest.approx((lam[0] + 1) * lam[0] * (lam[0] - 1))
    # n_Θ⁻ has poles where c_Θ⁻ does
    assert n_theta_minus(a1, m, empty, np.array([-1.0 + 0j])).is_pole


def test_c_minus_over_n_minus_counts_zero_multiplicity_roots(a1, b2):
    empty = ThetaSet.empty(1)
    lam = np.array([0.4 + 0.7j])
    assert c_minus_over_n_minus(a1, empty, lam) == pytest.approx(1 / gamma(1 - lam[0]), rel=1e-12)
    # a zero multiplicity has no c-factor but keeps its Gamma factor in n_Θ⁻
    zero = MultiplicityFunction.constant(a1, 0)
    assert c_theta_minus(a1, zero, empty, lam).value == pytest.approx(1.0)
    assert n_theta_minus(a1, zero, empty, lam).value == pytest.approx(gamma(1 - lam[0]), rel=1e-12)

    m = MultiplicityFunction.by_length(b2, 2, 0)
    th = ThetaSet.empty(2)
    lam = np.array([0.3 + 0.6j, 0.1 + 1.1j])
    expected = c_theta_minus(b2, m, th, lam).value / n_theta_minus(b2, m, th, lam).value
    assert c_minus_over_n_minus(b2, th, lam) == pytest.approx(expected, rel=1e-10)


def test_c_pi0_minus_reciprocal(a2, rng):
    m = MultiplicityFunction.constant(a2, 4)
    th = ThetaSet((0,), 2)
    for _ in range(5):
        lam = rng.normal(size=2) + 1j * rng.normal(size=2)
        value = c_pi0_minus(a2, m, th, lam).value
        assert value * c_pi0_minus_even_reciprocal(a2, m, th, lam) == pytest.approx(1.0, rel=1e-10)


def test_even_only_operations_reject_odd_multiplicity(a1):
    m = MultiplicityFunction.constant(a1, 1)
    with pytest.raises(InvalidSpecError):
        e_theta_minus(a1, m, ThetaSet.empty(1), np.array([0.5j]))
    with pytest.raises(InvalidSpecError):
        c_theta_plus(a1, m, ThetaSet.full(1), np.array([0.5j]), form='product')
