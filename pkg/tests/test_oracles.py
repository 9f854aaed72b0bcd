# tests/test_oracles.py

import mpmath
import numpy as np
import pytest

from analysis.errors import DomainError, PoleError
from analysis.oracles import (
    Hyper2F1Params, beta_c_minus, complex_beta, complex_case_ncc_phi, complex_case_phi, complex_gamma, gauss_2f1,
    rankone_phi_ncc, rankone_phi_riemannian, rankone_phi_second_kind
)
from analysis.rootsys import ThetaSet


def _mp_2f1(a, b, c, z) -> complex:
    return complex(mpmath.hyp2f1(a, b, c, z))


def test_2f1_special_values():
    assert gauss_2f1(Hyper2F1Params(0.3, 0.7, 1.5, 0)) == 1
    assert gauss_2f1(Hyper2F1Params(1, 1, 2, 0.5)) == pytest.approx(-np.log(0.5) / 0.5, rel=1e-12)
    assert gauss_2f1(Hyper2F1Params(1, 0.8, 0.8, 0.25)) == pytest.approx(4 / 3, rel=1e-12)


@pytest.mark.parametrize('a,b,c,z', [
    (0.5 + 0.2j, -0.3 + 1j, 1.5, 0.4 + 0.3j),
    (1.25, 0.75 - 0.5j, 2.5, -0.7),
    (0.5 + 1j, 0.5 - 1j, 1.5, -3.7),
    (0.5 + 1j, 0.5 - 1j, 1.5, -100.0),
    (0.25, 1.75, 1 - 0.4j, 0.95),
])
def test_2f1_against_mpmath(a, b, c, z):
    expected = _mp_2f1(a, b, c, z)
    assert abs(gauss_2f1(Hyper2F1Params(a, b, c, z)) - expected) <= 1e-10 * abs(expected)


def test_2f1_errors():
    with pytest.raises(PoleError):
        gauss_2f1(Hyper2F1Params(1, 1, -2, 0.3))
    with pytest.raises(DomainError):
        gauss_2f1(Hyper2F1Params(1, 1, 2, 2.0))
    with pytest.raises(DomainError):
        gauss_2f1(Hyper2F1Params(1, 1, 2, 0.9j))


def test_gamma_and_beta():
    assert complex_gamma(5) == pytest.approx(24.0)
    z = 0.3 + 1.7j
    assert complex_gamma(z) == pytest.approx(complex(mpmath.gamma(z)), rel=1e-12)
    assert np.isinf(complex_gamma(-2))
    assert complex_beta(2, 3) == pytest.approx(1 / 12)
    assert beta_c_minus(2, -2) == pytest.approx(0.5)


@pytest.mark.parametrize('m', [1.0, 2.0, 3.0, 4.0])
def test_riemannian_function_properties(m):
    assert rankone_phi_riemannian(m, 0.7 + 0.4j, 0.0) == 1
    for t in (0.3, 1.0, 2.5):
        plus = rankone_phi_riemannian(m, 0.7 + 0.4j, t)
        minus = rankone_phi_riemannian(m, -0.7 - 0.4j, t)
        assert plus == pytest.approx(minus, rel=1e-10)
    with pytest.raises(DomainError):
        rankone_phi_riemannian(m, 0.5, -1.0)


def test_riemannian_complex_case():
    assert rankone_phi_riemannian(2, 2, 1.0) == pytest.approx(np.cosh(1.0), rel=1e-10)
    lam, t = 0.6 + 1.3j, 1.7
    assert rankone_phi_riemannian(2, lam, t) == pytest.approx(np.sinh(lam * t) / (lam * np.sinh(t)), rel=1e-10)


def test_second_kind_function():
    lam = 0.4 + 0.8j
    for m in (1.0, 2.0, 4.0):
        ratio = rankone_phi_second_kind(m, lam, 20.0) / np.exp((lam - m / 2) * 20.0)
        assert abs(ratio - 1) <= 1e-6
    assert rankone_phi_second_kind(0, lam, 1.3) == pytest.approx(np.exp(lam * 1.3), rel=1e-12)
    with pytest.raises(DomainError):
        rankone_phi_second_kind(2, lam, 0.0)


def test_ncc_function_complex_case():
    lam = 0.35 + 0.9j
    for t in (0.5, 1.0, 2.0):
        expected = -np.exp(lam * t) / (2 * lam * np.sinh(t))
        assert rankone_phi_ncc(2, lam, t) == pytest.approx(expected, rel=1e-10)
    with pytest.raises(PoleError):
        rankone_phi_ncc(2, 0.0, 1.0)


def test_complex_case_phi_rank_one(a1):
    lam, t = 0.6 + 1.3j, 1.7
    value = complex_case_phi(a1, np.array([lam]), np.array([t]))
    assert value == pytest.approx(rankone_phi_riemannian(2, lam, t), rel=1e-10)
    ncc = complex_case_ncc_phi(a1, ThetaSet.empty(1), np.array([lam]), np.array([t]))
    assert ncc == pytest.approx(np.exp(lam * t) / (lam * np.sinh(t)), rel=1e-12)


def test_complex_case_walls_and_poles(a2):
    with pytest.raises(DomainError):
        complex_case_phi(a2, np.array([0.3j, 0.5j]), np.zeros(2))
    with pytest.raises(PoleError):
        complex_case_phi(a2, np.zeros(2, dtype=complex), np.array([0.3, 0.9]))
