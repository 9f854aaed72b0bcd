# analysis/thetasph.py

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from analysis.coeffs import (MultiplicityFunction, c_hc, c_minus_over_n_minus, c_theta_minus, c_theta_plus, d_theta,
                             rho, CFunctionValue)
from analysis.errors import DomainError, InvalidSpecError, PoleError
from analysis.expcalc import complex_theta_closed_form
from analysis.hcseries import phi_hc
from analysis.oracles import rankone_phi_riemannian, rankone_phi_second_kind
from analysis.rootsys import (RootSystem, ThetaSet, a_theta_contains, dominant_representative, is_dominant,
                              lambda_alphas, parabolic, weyl_group)
from analysis.special import gamma_ratio_factor
from config.app_config import DEFAULT_NUMERICS

METHODS = ('series', 'closed_form_complex', 'closed_form_rankone')
REGULARIZATIONS = ('none', 'e_minus', 'n_minus')


@dataclass(frozen=True)
class ThetaSphericalValue:
    value: complex
    method: str
    regularization: str = 'none'
    est_error: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidSpecError('thetasph', 'unknown evaluation method', self.method)
        if self.regularization not in REGULARIZATIONS:
            raise InvalidSpecError('thetasph', 'unknown regularization', self.regularization)


def _finite(value: CFunctionValue, what: str, lam: np.ndarray) -> complex:
    if value.is_pole or not np.isfinite(value.value):
        raise PoleError('thetasph', f"λ at a pole of {what}", f"λ={lam}")
    return value.value


def _sign(exponent: float) -> int:
    return -1 if int(round(exponent)) % 2 else 1


def _is_complex_case(m: MultiplicityFunction) -> bool:
    return m.uniform() == 2.0


def _closed_form_available(rs: RootSystem, m: MultiplicityFunction) -> Optional[str]:
    if _is_complex_case(m):
        return 'closed_form_complex'
    if rs.rank == 1:
        return 'closed_form_rankone'
    return None


def _choose_method(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, H: np.ndarray, method: str) -> str:
    if method != 'auto':
        if method not in METHODS:
            raise InvalidSpecError('thetasph', 'unknown evaluation method', method)
        return method
    if is_dominant(rs, H):
        return 'series'
    closed = _closed_form_available(rs, m)
    if closed is None:
        raise DomainError('thetasph', 'H outside the dominant chamber and no closed form applies',
                          f"{rs.label}, m={m.label()}, H={H}")
    return closed


def _series_sum(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray, H: np.ndarray,
                N: Optional[int]):
    """Σ_{w∈W_Θ} c_Θ⁺(wλ) Φ_{wλ}(H) with the accumulated tail bound"""
    tol = DEFAULT_NUMERICS.generic_distance
    total, error = 0j, 0.0
    for w in parabolic(rs, th).subgroup:
        w_lam = w.act(lam)
        weight = _finite(c_theta_plus(rs, m, th, w_lam, tol=tol), 'c_Θ⁺', w_lam)
        series = phi_hc(rs, m, w_lam, H, N)
        total += weight * series.value
        error += abs(weight) * series.tail_bound
    return total, error


def rankone_theta_closed_form(m: float, th: ThetaSet, lam_alpha: complex, t: float) -> complex:
    """
    Rank-one φ_Θ for any multiplicity.

    Θ=Π: c_Π⁺(m;ρ) times the Jacobi function of the first kind, valid for all real t.
    Θ=∅: c_∅⁻(m;λ) times the Jacobi function of the second kind, valid for t > 0.
    """
    lam_alpha = complex(lam_alpha)
    if th.rank != 1:
        raise InvalidSpecError('thetasph', 'rank-one closed form needs a rank-one Θ', th.label())
    if th.is_full:
        plus_rho = np.exp(_log_plus_rho(m))
        return plus_rho * rankone_phi_riemannian(m, lam_alpha, abs(t))
    if t <= 0:
        raise DomainError('thetasph', 'H outside 𝔞_Θ', f"t={t}")
    log_value, order = gamma_ratio_factor(-lam_alpha - m / 2 + 1, -lam_alpha + 1,
                                          DEFAULT_NUMERICS.generic_distance)
    if order > 0:
        raise PoleError('thetasph', 'λ at a pole of c_Θ⁻', f"λ_α={lam_alpha}")
    if order < 0:
        return 0j
    return complex(np.exp(log_value)) * rankone_phi_second_kind(m, lam_alpha, t)


def _log_plus_rho(m: float) -> float:
    """log c_Π⁺(m;ρ) in rank one, where ρ_α = m/2"""
    log_value, _ = gamma_ratio_factor(m / 2, m, DEFAULT_NUMERICS.pole_tol) if m > 0 else (0.0, 0)
    return float(np.real(log_value))


def theta_spherical(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray, H: np.ndarray,
                    N: Optional[int] = None, method: str = 'auto') -> ThetaSphericalValue:
    """
    Θ-spherical function φ_Θ(m;λ, exp H) = c_Θ⁻(λ) Σ_{w∈W_Θ} c_Θ⁺(wλ) Φ_{wλ}(exp H).

    The series is summed on the dominant chamber. Off the chamber, H must lie
    in 𝔞_Θ and a closed form must exist (m ≡ 2, or rank one).

    Args:
        rs: Root system
        m: Multiplicity function
        th: Subset of simple roots
        lam: Spectral parameter
        H: Torus point in log coordinates
        N: Series truncation height
        method: One of series, closed_form_complex, closed_form_rankone or auto

    Returns:
        ThetaSphericalValue: Value, evaluation path and error estimate

    Raises:
        PoleError: If λ is at a pole of c_Θ⁻ or c_Θ⁺
        NonGenericError: If the series recursion breaks down
        DomainError: If H is outside the admissible domain
    """
    lam = np.asarray(lam, dtype=complex)
    H = np.asarray(H, dtype=float)
    chosen = _choose_method(rs, m, th, H, method)

    if chosen == 'series':
        minus = _finite(c_theta_minus(rs, m, th, lam, tol=DEFAULT_NUMERICS.generic_distance), 'c_Θ⁻', lam)
        total, error = _series_sum(rs, m, th, lam, H, N)
        return ThetaSphericalValue(minus * total, 'series', 'none', abs(minus) * error)

    if not a_theta_contains(rs, th, H):
        raise DomainError('thetasph', 'H outside 𝔞_Θ', f"Θ={th.label()}, H={H}")
    if chosen == 'closed_form_complex':
        if not _is_complex_case(m):
            raise InvalidSpecError('thetasph', 'complex closed form needs m ≡ 2', m.label())
        return ThetaSphericalValue(complex_theta_closed_form(rs, th, lam, H), chosen)
    if rs.rank != 1:
        raise InvalidSpecError('thetasph', 'rank-one closed form needs rank one', rs.label)
    m_alpha = m.value_for(rs.simple_roots[0])
    t = float(rs.simple_roots[0] @ H)
    lam_alpha = complex(lambda_alphas(rs.simple_roots, lam)[0])
    return ThetaSphericalValue(rankone_theta_closed_form(m_alpha, th, lam_alpha, t), chosen)


def hypergeometric_ho(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, H: np.ndarray,
                      N: Optional[int] = None) -> ThetaSphericalValue:
    """
    Hypergeometric function φ_λ(m) = Σ_{w∈W} c(m;wλ) Φ_{wλ}(m), with c(ρ) = 1.

    H is first moved to the dominant chamber, since φ_λ is W-invariant in H.
    """
    lam = np.asarray(lam, dtype=complex)
    H = dominant_representative(rs, np.asarray(H, dtype=float))
    if not is_dominant(rs, H):
        raise DomainError('thetasph', 'H lies on a root wall', f"H={H}")
    total, error = 0j, 0.0
    for w in weyl_group(rs):
        w_lam = w.act(lam)
        weight = _finite(c_hc(rs, m, w_lam, tol=DEFAULT_NUMERICS.generic_distance), 'c', w_lam)
        series = phi_hc(rs, m, w_lam, H, N)
        total += weight * series.value
        error += abs(weight) * series.tail_bound
    return ThetaSphericalValue(total, 'series', 'none', error)


def _phi_pi_at(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, H: np.ndarray,
               N: Optional[int]) -> ThetaSphericalValue:
    """φ_Π at any regular H through its dominant representative"""
    full = ThetaSet.full(rs.rank)
    dominant = dominant_representative(rs, H)
    if is_dominant(rs, dominant):
        return theta_spherical(rs, m, full, lam, dominant, N)
    if _closed_form_available(rs, m) == 'closed_form_rankone':
        return theta_spherical(rs, m, full, lam, dominant, N, method='closed_form_rankone')
    raise DomainError('thetasph', 'H lies on a root wall', f"H={H}")


def e_theta(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray, H: np.ndarray,
            N: Optional[int] = None) -> complex:
    """
    E_Θ(m;λ, exp H) = (c_Θ⁻ c_Θ⁺ / c_Π⁺)(λ) φ_Π(m;λ, exp H) on 𝔞_Θ.

    For even m the prefactor is the sign (-1)^{d(Θ,m)}.
    """
    lam = np.asarray(lam, dtype=complex)
    H = np.asarray(H, dtype=float)
    if not a_theta_contains(rs, th, H):
        raise DomainError('thetasph', 'H outside 𝔞_Θ', f"Θ={th.label()}, H={H}")
    if m.is_even:
        prefactor = _sign(d_theta(rs, m, th))
    else:
        tol = DEFAULT_NUMERICS.generic_distance
        full = ThetaSet.full(rs.rank)
        minus = _finite(c_theta_minus(rs, m, th, lam, tol=tol), 'c_Θ⁻', lam)
        plus = _finite(c_theta_plus(rs, m, th, lam, tol=tol), 'c_Θ⁺', lam)
        plus_pi = _finite(c_theta_plus(rs, m, full, lam, tol=tol), 'c_Π⁺', lam)
        if abs(plus_pi) <= tol:
            raise PoleError('thetasph', 'c_Π⁺ vanishes at λ', f"λ={lam}")
        prefactor = minus * plus / plus_pi
    return complex(prefactor * _phi_pi_at(rs, m, lam, H, N).value)


def _regularized_prefactor(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray,
                           kind: str) -> complex:
    """
    e_Θ⁻c_Θ⁻ = (-1)^{d(Θ,m)} Π_α Π_{k=1}^{m_α/2-1} (λ_α - k) for even m, and
    c_Θ⁻/n_Θ⁻ = Π_α 1/Γ(1-λ_α) in general. Both are entire in λ.
    """
    roots = parabolic(rs, th).complement_roots
    lams, mults = lambda_alphas(roots, lam), m.values(roots)
    if kind == 'e_minus':
        value = complex(_sign(d_theta(rs, m, th)))
        for lam_a, m_a in zip(lams, mults):
            for k in range(1, int(m_a) // 2):
                value *= lam_a - k
        return value
    return c_minus_over_n_minus(rs, th, lam)


def regularized_theta(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray, H: np.ndarray,
                      N: Optional[int] = None, kind: str = 'auto') -> ThetaSphericalValue:
    """
    Holomorphic extensions e_Θ⁻φ_Θ (even m) and φ_Θ/n_Θ⁻ (any m).

    The entire prefactor is formed before the W_Θ-sum, so the value stays
    finite on the pole hyperplanes of c_Θ⁻.
    """
    lam = np.asarray(lam, dtype=complex)
    H = np.asarray(H, dtype=float)
    if kind == 'auto':
        kind = 'e_minus' if m.is_even else 'n_minus'
    if kind not in ('e_minus', 'n_minus'):
        raise InvalidSpecError('thetasph', 'unknown regularization', kind)
    if kind == 'e_minus' and not m.is_even:
        raise InvalidSpecError('thetasph', 'e_Θ⁻ regularization needs even m', m.label())
    prefactor = _regularized_prefactor(rs, m, th, lam, kind)

    if is_dominant(rs, H):
        total, error = _series_sum(rs, m, th, lam, H, N)
        return ThetaSphericalValue(prefactor * total, 'series', kind, abs(prefactor) * error)

    if not a_theta_contains(rs, th, H):
        raise DomainError('thetasph', 'H outside 𝔞_Θ', f"Θ={th.label()}, H={H}")
    method = _closed_form_available(rs, m)
    if method == 'closed_form_complex':
        # e_Θ⁻ cancels the complement part of π(λ)
        theta_roots = parabolic(rs, th).theta_roots
        pi_theta = complex(np.prod(lambda_alphas(theta_roots, lam)))
        if abs(pi_theta) <= DEFAULT_NUMERICS.pole_tol:
            raise PoleError('thetasph', 'π_Θ(λ) vanishes', f"λ={lam}")
        delta = complex(np.prod(2 * np.sinh(rs.positive_roots @ H)))
        alternating = sum(w.det * np.exp(w.act(lam) @ H) for w in parabolic(rs, th).subgroup)
        value = _sign(d_theta(rs, m, th)) * alternating / (pi_theta * delta)
        if kind == 'n_minus':
            value *= prefactor / _regularized_prefactor(rs, m, th, lam, 'e_minus')
        return ThetaSphericalValue(complex(value), method, kind)
    if method == 'closed_form_rankone' and th.is_full:
        return ThetaSphericalValue(theta_spherical(rs, m, th, lam, H, N, method=method).value, method, kind)
    raise DomainError('thetasph', 'H outside the dominant chamber and no closed form applies', f"H={H}")


def phi_pi_from_theta(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray, H: np.ndarray,
                      N: Optional[int] = None) -> complex:
    """(-1)^{d(Θ,m)} Σ_{v∈W_Θ\\W} φ_Θ(m; vλ, exp H); equals φ_Π for even m"""
    lam = np.asarray(lam, dtype=complex)
    total = 0j
    for v in parabolic(rs, th).coset_reps:
        total += theta_spherical(rs, m, th, v.act(lam), H, N).value
    return _sign(d_theta(rs, m, th)) * total


def radial_laplacian_residual(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray,
                              f: Callable[[np.ndarray], complex], H: np.ndarray, h: float = 1e-3) -> float:
    """
    Relative residual of the eigen-equation L f = (⟨λ,λ⟩ - ⟨ρ,ρ⟩) f, where
    L = Σ_i ∂(H_i)² + Σ_{α∈Σ⁺} m_α coth α(H) ∂(A_α).

    Derivatives are second-order central differences with step h.

    Raises:
        DomainError: If H is not dominant with margin 3h
    """
    H = np.asarray(H, dtype=float)
    lam = np.asarray(lam, dtype=complex)
    if h <= 0 or not is_dominant(rs, H, margin=3 * h * np.max(np.linalg.norm(rs.simple_roots, axis=1))):
        raise DomainError('thetasph', 'step too large for the distance to the walls', f"h={h}, H={H}")

    r = rs.rank
    center = complex(f(H))
    gradient = np.zeros(r, dtype=complex)
    laplacian = 0j
    for i in range(r):
        step = np.zeros(r)
        step[i] = h
        forward, backward = complex(f(H + step)), complex(f(H - step))
        gradient[i] = (forward - backward) / (2 * h)
        laplacian += (forward - 2 * center + backward) / h ** 2

    positive = rs.positive_roots
    weights = m.values(positive)
    alpha_h = positive @ H
    first_order = np.sum(weights / np.tanh(alpha_h) * (positive @ gradient))
    rho_vec = rho(rs, m)
    eigenvalue = complex(lam @ lam) - float(rho_vec @ rho_vec)
    residual = laplacian + first_order - eigenvalue * center
    return float(abs(residual) / (1 + abs(center)))
