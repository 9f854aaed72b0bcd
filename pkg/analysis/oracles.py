# analysis/oracles.py

from dataclasses import dataclass

import numpy as np

from analysis.coeffs import pi_poly, weyl_denominator
from analysis.errors import ConvergenceError, DomainError, PoleError
from analysis.rootsys import RootSystem, ThetaSet, parabolic, weyl_group
from analysis.special import complex_beta, complex_gamma, is_gamma_pole
from config.app_config import DEFAULT_NUMERICS

__all__ = [
    'Hyper2F1Params', 'gauss_2f1', 'rankone_phi_riemannian', 'rankone_phi_second_kind',
    'rankone_phi_ncc', 'beta_c_minus', 'complex_case_phi', 'complex_case_ncc_phi',
    'complex_gamma', 'complex_beta',
]

_BLOCK = 2048


@dataclass(frozen=True)
class Hyper2F1Params:
    a: complex
    b: complex
    c: complex
    z: complex


def _series(a: complex, b: complex, c: complex, z: complex) -> complex:
    """
    Raw hypergeometric series, summed in blocks of term ratios.

    Stops once a block ends with terms below hyp_series_tol relative to the
    partial sum, or when the series terminates.
    """
    tol = DEFAULT_NUMERICS.hyp_series_tol
    max_terms = DEFAULT_NUMERICS.hyp_max_terms
    total = 1 + 0j
    term = 1 + 0j
    n0 = 0
    while n0 < max_terms:
        n = np.arange(n0, n0 + _BLOCK, dtype=float)
        ratios = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        terms = term * np.cumprod(ratios)
        total += terms.sum()
        term = terms[-1]
        n0 += _BLOCK
        if term == 0:
            return complex(total)
        tail_ratio = abs(ratios[-1])
        if tail_ratio < 1 and abs(term) / (1 - tail_ratio) <= tol * max(abs(total), 1e-300):
            return complex(total)
    raise ConvergenceError('oracles', '2F1 series did not converge',
                           f"a={a}, b={b}, c={c}, z={z}, terms={max_terms}")


def gauss_2f1(p: Hyper2F1Params) -> complex:
    """
    Gauss hypergeometric function ₂F₁(a,b;c;z).

    The raw series is used for |z| ≤ hyp_series_radius and for real z in
    [0, 1). Real negative z goes through the Pfaff transformation
    ₂F₁(a,b;c;z) = (1-z)^{-a} ₂F₁(a, c-b; c; z/(z-1)).

    Raises:
        PoleError: If c is a nonpositive integer
        DomainError: If z is outside the covered set
        ConvergenceError: If the series exhausts hyp_max_terms
    """
    a, b, c, z = complex(p.a), complex(p.b), complex(p.c), complex(p.z)
    if is_gamma_pole(c):
        raise PoleError('oracles', '2F1 lower parameter is a nonpositive integer', f"c={c}")
    if z == 0:
        return 1 + 0j
    real_axis = abs(z.imag) <= 1e-15 * max(1.0, abs(z.real))
    if real_axis and z.real < 0:
        x = z.real
        w = x / (x - 1)
        if abs(z) <= DEFAULT_NUMERICS.hyp_series_radius and abs(z) <= w:
            return _series(a, b, c, z)
        return complex((1 - x) ** (-a)) * _series(a, c - b, c, w)
    if abs(z) <= DEFAULT_NUMERICS.hyp_series_radius or (real_axis and 0 < z.real < 1):
        return _series(a, b, c, z)
    raise DomainError('oracles', '2F1 argument outside supported domain', f"z={z}")


def rankone_phi_riemannian(m: float, lam: complex, t: float) -> complex:
    """
    Spherical function of a rank-one Riemannian space as a Jacobi function:
    ₂F₁((m+2λ)/4, (m-2λ)/4; (m+1)/2; -sinh²t).
    """
    if t < 0:
        raise DomainError('oracles', 'negative radial coordinate', f"t={t}")
    if t == 0:
        return 1 + 0j
    lam = complex(lam)
    return gauss_2f1(Hyper2F1Params((m + 2 * lam) / 4, (m - 2 * lam) / 4, (m + 1) / 2, -np.sinh(t) ** 2))


def rankone_phi_second_kind(m: float, lam: complex, t: float) -> complex:
    """
    Jacobi function of the second kind, asymptotic to e^{(λ-ρ)t}:
    (2 sinh t)^{λ-ρ} ₂F₁((ρ-λ)/2, (-m/2+1-λ)/2; 1-λ; -sinh⁻²t).
    """
    if t <= 0:
        raise DomainError('oracles', 'second kind function needs t > 0', f"t={t}")
    lam = complex(lam)
    rho = m / 2
    hyper = gauss_2f1(Hyper2F1Params((rho - lam) / 2, (-m / 2 + 1 - lam) / 2, 1 - lam, -1.0 / np.sinh(t) ** 2))
    return complex(np.exp((lam - rho) * np.log(2 * np.sinh(t)))) * hyper


def beta_c_minus(m: float, lam: complex) -> complex:
    """Rank-one c⁻(λ) = Γ(ρ)Γ(-λ-ρ+1)/Γ(1-λ) = B(ρ, -λ-ρ+1)"""
    rho = m / 2
    return complex_beta(rho, -complex(lam) - rho + 1)


def rankone_phi_ncc(m: float, lam: complex, t: float) -> complex:
    """
    Rank-one NCC spherical function
    c⁻(λ) (2 cosh t)^{λ-ρ} ₂F₁((ρ-λ)/2, (ρ+1-λ)/2; 1-λ; cosh⁻²t).

    Raises:
        PoleError: If c⁻ has a pole at λ
    """
    if t <= 0:
        raise DomainError('oracles', 'NCC function needs t > 0', f"t={t}")
    lam = complex(lam)
    rho = m / 2
    c_minus = beta_c_minus(m, lam)
    if not np.isfinite(c_minus):
        raise PoleError('oracles', 'pole of c⁻', f"λ={lam}, m={m}")
    hyper = gauss_2f1(Hyper2F1Params((rho - lam) / 2, (rho + 1 - lam) / 2, 1 - lam, 1.0 / np.cosh(t) ** 2))
    return c_minus * complex(np.exp((lam - rho) * np.log(2 * np.cosh(t)))) * hyper


def _alternating_sum(group, lam: np.ndarray, H: np.ndarray) -> complex:
    return complex(sum(w.det * np.exp(w.act(lam) @ H) for w in group))


def _checked_denominator(rs: RootSystem, lam: np.ndarray, H: np.ndarray, tol: float) -> complex:
    delta = complex(weyl_denominator(rs, H))
    if abs(delta) <= tol:
        raise DomainError('oracles', 'H lies on a root wall', f"Δ(exp H) = {delta:.3g}")
    pi_lam = pi_poly(rs, lam)
    if abs(pi_lam) <= tol:
        raise PoleError('oracles', 'π(λ) vanishes', f"λ={lam}")
    return delta * pi_lam


def complex_case_phi(rs: RootSystem, lam: np.ndarray, H: np.ndarray) -> complex:
    """φ_λ = (π(ρ)/π(λ)) Σ_w det(w) e^{wλ(H)} / Δ(exp H) for m ≡ 2"""
    lam = np.asarray(lam, dtype=complex)
    H = np.asarray(H, dtype=float)
    tol = DEFAULT_NUMERICS.pole_tol
    denominator = _checked_denominator(rs, lam, H, tol)
    rho = rs.positive_roots.sum(axis=0)
    return pi_poly(rs, rho) * _alternating_sum(weyl_group(rs), lam, H) / denominator


def complex_case_ncc_phi(rs: RootSystem, th: ThetaSet, lam: np.ndarray, H: np.ndarray) -> complex:
    """
    Complex-case NCC function with unit constants:
    c⁻(λ) Σ_{W_Θ} det(w) e^{wλ(H)} / (Π_{⟨Θ⟩⁺} λ_α Π_{Σ⁺} sinh α(H)),
    where c⁻(λ) = Π_{Σ⁺∖⟨Θ⟩⁺} λ_α⁻¹.
    """
    lam = np.asarray(lam, dtype=complex)
    H = np.asarray(H, dtype=float)
    tol = DEFAULT_NUMERICS.pole_tol
    sinh_product = complex(np.prod(np.sinh(rs.positive_roots @ H)))
    if abs(sinh_product) <= tol:
        raise DomainError('oracles', 'H lies on a root wall', f"Π sinh α(H) = {sinh_product:.3g}")
    pi_lam = pi_poly(rs, lam)
    if abs(pi_lam) <= tol:
        raise PoleError('oracles', 'π(λ) vanishes', f"λ={lam}")
    return _alternating_sum(parabolic(rs, th).subgroup, lam, H) / (pi_lam * sinh_product)
