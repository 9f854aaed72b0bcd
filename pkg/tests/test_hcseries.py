# tests/test_hcseries.py

import numpy as np
import pytest

from analysis.coeffs import MultiplicityFunction
from analysis.errors import DomainError, InvalidSpecError, NonGenericError
from analysis.hcseries import gamma_coeffs, phi_hc, recursion_residual
from analysis.oracles import rankone_phi_second_kind
from analysis.rootsys import LatticeVector


def test_complex_case_coefficients_are_one(a1, m2_a1):
    table = gamma_coeffs(a1, m2_a1, np.array([0.3 + 0.7j]), 24)
    assert table.get((0,)) == 1
    for n in range(1, 13):
        assert abs(table.get((2 * n,)) - 1) <= 1e-12
        assert table.get((2 * n - 1,)) == 0
    assert table.get(LatticeVector((4,))) == table.get((4,))


def test_lookup_outside_table(a1, m2_a1):
    table = gamma_coeffs(a1, m2_a1, np.array([0.3 + 0.7j]), 4)
    with pytest.raises(InvalidSpecError):
        table.get((6,))


def test_non_generic_lambda(a1, m2_a1):
    # ⟨μ,μ-2λ⟩ vanishes at μ = 2α when λ_α = 1
    with pytest.raises(NonGenericError):
        gamma_coeffs(a1, m2_a1, np.array([1.0 + 0j]), 6)


def test_wrong_dimension(a2, m2_a2):
    with pytest.raises(InvalidSpecError):
        gamma_coeffs(a2, m2_a2, np.array([0.5j]), 4)


@pytest.mark.parametrize('m', [1.0, 2.0, 3.0])
def test_recursion_residual_a2(a2, m):
    mult = MultiplicityFunction.constant(a2, m)
    table = gamma_coeffs(a2, mult, np.array([0.2 + 0.9j, -0.4 + 0.5j]), 12)
    assert recursion_residual(table) <= 1e-12


def test_recursion_residual_b2(b2):
    mult = MultiplicityFunction.by_length(b2, 2, 1)
    table = gamma_coeffs(b2, mult, np.array([0.3 + 0.6j, 0.1 + 1.1j]), 10)
    assert recursion_residual(table) <= 1e-12


@pytest.mark.parametrize('m', [2.0, 4.0, 6.0])
def test_rankone_series_matches_second_kind_function(a1, m, rng):
    mult = MultiplicityFunction.constant(a1, m)
    for _ in range(20):
        lam = complex(rng.uniform(-1.5, 1.5), rng.uniform(0.3, 2.0))
        t = rng.uniform(0.5, 3.0)
        series = phi_hc(a1, mult, np.array([lam]), np.array([t]), N=40, target=1e-10)
        expected = rankone_phi_second_kind(m, lam, t)
        assert abs(series.value - expected) <= 1e-8 * abs(expected)
        assert series.terms_used >= 41


def test_target_extends_the_order_only_when_needed(a1):
    mult = MultiplicityFunction.constant(a1, 6.0)
    lam, H = np.array([0.7 + 0.4j]), np.array([0.5])
    fixed = phi_hc(a1, mult, lam, H, N=40)
    extended = phi_hc(a1, mult, lam, H, N=40, target=1e-10)
    assert fixed.tail_bound > 1e-10 * abs(fixed.value)
    assert extended.terms_used > fixed.terms_used
    assert extended.tail_bound <= 1e-10 * abs(extended.value)
    assert abs(extended.value - rankone_phi_second_kind(6.0, lam[0], 0.5)) <= 1e-9 * abs(extended.value)

    far = np.array([3.0])
    assert phi_hc(a1, mult, lam, far, N=40, target=1e-10).terms_used == 41


def test_complex_case_closed_form(a1, m2_a1):
    lam, t = 0.5 + 1j, 1.0
    series = phi_hc(a1, m2_a1, np.array([lam]), np.array([t]), N=40)
    assert series.value == pytest.approx(np.exp(lam * t) / (2 * np.sinh(t)), rel=1e-10)
    assert series.terms_used == 41
    assert series.tail_bound < 1e-10


def test_phi_hc_requires_dominant_point(a2, m2_a2):
    with pytest.raises(DomainError):
        phi_hc(a2, m2_a2, np.array([0.5j, 0.2j]), np.array([-0.5, 0.3]))


def test_tail_bound_shrinks_with_order(a2, m2_a2, dominant):
    H = dominant(a2, [0.6, 0.8])
    lam = np.array([0.2 + 0.9j, -0.1 + 0.4j])
    coarse = phi_hc(a2, m2_a2, lam, H, N=10)
    fine = phi_hc(a2, m2_a2, lam, H, N=30)
    assert fine.tail_bound < coarse.tail_bound
    assert abs(fine.value - coarse.value) <= 10 * coarse.tail_bound
