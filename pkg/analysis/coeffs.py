# analysis/coeffs.py

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.special import rgamma

from analysis.errors import InvalidSpecError
from analysis.rootsys import RootSystem, ThetaSet, lambda_alphas, parabolic
from analysis.special import Factor, beta_factor, gamma_factor, gamma_ratio_factor, log_gamma
from config.app_config import DEFAULT_NUMERICS

_LENGTH_TOL = 1e-9


@dataclass(frozen=True)
class MultiplicityFunction:
    """
    W-invariant multiplicity function.

    Roots of equal length form a single W-orbit in an irreducible system, so
    values are keyed by squared root length.
    """
    orbit_values: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        for length, value in self.orbit_values:
            if value < 0:
                raise InvalidSpecError('coeffs', 'negative multiplicity', f"m={value}")
            if length <= 0:
                raise InvalidSpecError('coeffs', 'invalid orbit length', f"|α|²={length}")

    @classmethod
    def constant(cls, rs: RootSystem, m: float) -> 'MultiplicityFunction':
        return cls(tuple((length, float(m)) for length in root_lengths(rs)))

    @classmethod
    def by_length(cls, rs: RootSystem, long: float, short: Optional[float] = None) -> 'MultiplicityFunction':
        lengths = root_lengths(rs)
        if len(lengths) == 1:
            if short is not None and short != long:
                raise InvalidSpecError('coeffs', 'simply laced system has one root length',
                                       f"{rs.label}: long={long}, short={short}")
            return cls(((lengths[0], float(long)),))
        short = long if short is None else short
        return cls(((lengths[0], float(short)), (lengths[1], float(long))))

    def value_for(self, alpha: np.ndarray) -> float:
        length = float(np.dot(alpha, alpha))
        for orbit_length, value in self.orbit_values:
            if abs(orbit_length - length) < _LENGTH_TOL * max(1.0, length):
                return value
        raise InvalidSpecError('coeffs', 'root length not covered by multiplicity', f"|α|²={length}")

    def values(self, roots: np.ndarray) -> np.ndarray:
        return np.array([self.value_for(alpha) for alpha in np.atleast_2d(roots)], dtype=float) \
            if np.size(roots) else np.zeros(0)

    @property
    def is_even(self) -> bool:
        return all(float(v).is_integer() and int(v) % 2 == 0 for _, v in self.orbit_values)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for _, v in self.orbit_values)

    def uniform(self) -> Optional[float]:
        values = {v for _, v in self.orbit_values}
        return values.pop() if len(values) == 1 else None

    def key(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((round(length, 9), value) for length, value in self.orbit_values)

    def label(self) -> str:
        uniform = self.uniform()
        if uniform is not None:
            return f"{uniform:g}"
        return '/'.join(f"{value:g}" for _, value in sorted(self.orbit_values, reverse=True))


def root_lengths(rs: RootSystem) -> Tuple[float, ...]:
    lengths = []
    for alpha in rs.positive_roots:
        length = float(alpha @ alpha)
        if not any(abs(length - seen) < _LENGTH_TOL * max(1.0, length) for seen in lengths):
            lengths.append(length)
    return tuple(sorted(lengths))


@dataclass(frozen=True)
class CFunctionValue:
    """Value of a meromorphic coefficient function with its pole status"""
    value: complex
    is_pole: bool
    pole_order: int

    @classmethod
    def from_factors(cls, factors: Iterable[Factor]) -> 'CFunctionValue':
        log_total = 0j
        order = 0
        poles = zeros = 0
        for log_value, factor_order in factors:
            log_total += log_value
            order += factor_order
            poles += factor_order > 0
            zeros += factor_order < 0
        if order > 0:
            return cls(complex(np.inf, 0.0), True, order)
        if order < 0:
            return cls(0j, False, order)
        if poles:
            # pole and zero factors cancel in count but the limit is not determined factor-wise
            return cls(complex(np.nan, np.nan), True, 0)
        return cls(complex(np.exp(log_total)), False, 0)

    @classmethod
    def from_product(cls, value: complex, denominator: complex, tol: float) -> 'CFunctionValue':
        if abs(denominator) <= tol:
            return cls(complex(np.inf, 0.0), True, 1)
        return cls(complex(value / denominator), False, 0)

    def require_finite(self, module: str, what: str) -> complex:
        from analysis.errors import PoleError
        if self.is_pole or not np.isfinite(self.value):
            raise PoleError(module, f"pole of {what}", f"order={self.pole_order}")
        return self.value


def rho(rs: RootSystem, m: MultiplicityFunction) -> np.ndarray:
    """ρ(m) = ½ Σ_{α∈Σ⁺} m_α α"""
    positive = rs.positive_roots
    return 0.5 * (m.values(positive) @ positive)


def delta_density(rs: RootSystem, m: MultiplicityFunction, H: np.ndarray) -> np.ndarray:
    """
    δ(m; exp H) = Π_{α∈Σ⁺} |e^{α(H)} - e^{-α(H)}|^{m_α}.

    H may be a single point or an array of points along the last axis.
    """
    H = np.asarray(H, dtype=float)
    positive = rs.positive_roots
    weights = m.values(positive)
    alpha_h = H @ positive.T
    factors = np.abs(2.0 * np.sinh(alpha_h))
    with np.errstate(divide='ignore'):
        result = np.prod(np.where(weights > 0, factors ** weights, 1.0), axis=-1)
    return result


def weyl_denominator(rs: RootSystem, H: np.ndarray) -> np.ndarray:
    """Δ(exp H) = Π_{α∈Σ⁺} (e^{α(H)} - e^{-α(H)}); H may be complex"""
    H = np.asarray(H)
    return np.prod(2.0 * np.sinh(H @ rs.positive_roots.T), axis=-1)


def pi_poly(rs: RootSystem, lam: np.ndarray) -> complex:
    """π(λ) = Π_{α∈Σ⁺} λ_α"""
    return complex(np.prod(lambda_alphas(rs.positive_roots, lam)))


def d_theta(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet) -> float:
    """d(Θ,m) = ½ Σ_{α∈Σ⁺∖⟨Θ⟩⁺} m_α"""
    complement = parabolic(rs, th).complement_roots
    return 0.5 * float(np.sum(m.values(complement))) if complement.size else 0.0


def _sign_power(exponent: float) -> int:
    if not float(exponent).is_integer():
        raise InvalidSpecError('coeffs', 'sign exponent is not an integer', f"{exponent}")
    return -1 if int(exponent) % 2 else 1


def _require_even(m: MultiplicityFunction, operation: str) -> None:
    if not m.is_even:
        raise InvalidSpecError('coeffs', f"{operation} requires even multiplicities", m.label())


def _plus_factors(lams: np.ndarray, mults: np.ndarray, tol: float):
    for lam_a, m_a in zip(lams, mults):
        if m_a == 0:
            continue
        yield gamma_ratio_factor(lam_a, lam_a + m_a / 2, tol)


def _minus_factors(lams: np.ndarray, mults: np.ndarray, tol: float):
    for lam_a, m_a in zip(lams, mults):
        if m_a == 0:
            continue
        yield gamma_ratio_factor(-lam_a - m_a / 2 + 1, -lam_a + 1, tol)


def _rising_reciprocal(lams: np.ndarray, mults: np.ndarray) -> complex:
    """Π_α Π_{h=0}^{m_α/2-1} (λ_α + h)"""
    total = 1 + 0j
    for lam_a, m_a in zip(lams, mults):
        for h in range(int(m_a) // 2):
            total *= lam_a + h
    return total


def c_theta_plus(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray,
                 form: str = 'auto', tol: float = None) -> CFunctionValue:
    """
    c_Θ⁺(m;λ) = Π_{α∈⟨Θ⟩⁺} Γ(λ_α)/Γ(λ_α + m_α/2).

    ``form`` selects the Gamma form, the finite product for even m, or
    ``auto`` (product when m is even).
    """
    tol = DEFAULT_NUMERICS.pole_tol if tol is None else tol
    roots = parabolic(rs, th).theta_roots
    lams, mults = lambda_alphas(roots, lam), m.values(roots)
    if form == 'product' or (form == 'auto' and m.is_even):
        _require_even(m, 'finite-product c_Θ⁺')
        return CFunctionValue.from_product(1.0, _rising_reciprocal(lams, mults), tol)
    return CFunctionValue.from_factors(_plus_factors(lams, mults, tol))


def c_theta_minus(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray,
                  form: str = 'auto', tol: float = None) -> CFunctionValue:
    """c_Θ⁻(m;λ) = Π_{α∈Σ⁺∖⟨Θ⟩⁺} Γ(-λ_α - m_α/2 + 1)/Γ(-λ_α + 1)"""
    tol = DEFAULT_NUMERICS.pole_tol if tol is None else tol
    roots = parabolic(rs, th).complement_roots
    lams, mults = lambda_alphas(roots, lam), m.values(roots)
    if form == 'product' or (form == 'auto' and m.is_even):
        _require_even(m, 'finite-product c_Θ⁻')
        sign = _sign_power(d_theta(rs, m, th))
        return CFunctionValue.from_product(sign, _rising_reciprocal(lams, mults), tol)
    return CFunctionValue.from_factors(_minus_factors(lams, mults, tol))


def c_theta(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray,
            tol: float = None) -> CFunctionValue:
    """c_Θ := c_Θ⁺ c_Θ⁻"""
    plus = c_theta_plus(rs, m, th, lam, tol=tol)
    minus = c_theta_minus(rs, m, th, lam, tol=tol)
    if plus.is_pole or minus.is_pole:
        return CFunctionValue(complex(np.inf, 0.0), True, max(plus.pole_order, 0) + max(minus.pole_order, 0))
    return CFunctionValue(plus.value * minus.value, False, min(plus.pole_order, 0) + min(minus.pole_order, 0))


def n_theta_minus(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray,
                  tol: float = None) -> CFunctionValue:
    """n_Θ⁻(m;λ) = Π_{α∈Σ⁺∖⟨Θ⟩⁺} Γ(-λ_α - m_α/2 + 1)"""
    roots = parabolic(rs, th).complement_roots
    lams, mults = lambda_alphas(roots, lam), m.values(roots)
    return CFunctionValue.from_factors(gamma_factor(-l - ma / 2 + 1, tol) for l, ma in zip(lams, mults))


def c_minus_over_n_minus(rs: RootSystem, th: ThetaSet, lam: np.ndarray) -> complex:
    """
    c_Θ⁻/n_Θ⁻ = Π_{α∈Σ⁺∖⟨Θ⟩⁺} 1/Γ(1 - λ_α), entire in λ and independent of m.

    Runs over the same roots as n_Θ⁻; a root with m_α = 0 has c-factor 1
    and still contributes 1/Γ(1 - λ_α).
    """
    roots = parabolic(rs, th).complement_roots
    return complex(np.prod([rgamma(1 - l) for l in lambda_alphas(roots, lam)]))


def e_theta_minus(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray) -> complex:
    """e_Θ⁻(m;λ) = Π_{α∈Σ⁺∖⟨Θ⟩⁺} Π_{k=-m_α/2+1}^{m_α/2-1} (λ_α - k)"""
    _require_even(m, 'e_Θ⁻')
    roots = parabolic(rs, th).complement_roots
    return _symmetric_product(lambda_alphas(roots, lam), m.values(roots))


def e_theta_plus(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray) -> complex:
    """e_Θ⁺(m;λ) = (-1)^{Σ_{⟨Θ⟩⁺} m_α/2} Π_{α∈⟨Θ⟩⁺} Π_k (λ_α - k)"""
    _require_even(m, 'e_Θ⁺')
    roots = parabolic(rs, th).theta_roots
    mults = m.values(roots)
    sign = _sign_power(float(np.sum(mults)) / 2)
    return sign * _symmetric_product(lambda_alphas(roots, lam), mults)


def _symmetric_product(lams: np.ndarray, mults: np.ndarray) -> complex:
    total = 1 + 0j
    for lam_a, m_a in zip(lams, mults):
        half = int(m_a) // 2
        for k in range(-half + 1, half):
            total *= lam_a - k
    return total


def c_pi0_minus(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam: np.ndarray,
                tol: float = None) -> CFunctionValue:
    """Π_{α∈Σ⁺∖⟨Θ⟩⁺} B(m_α/2, -λ_α - m_α/2 + 1), with the free constant set to 1"""
    roots = parabolic(rs, th).complement_roots
    lams, mults = lambda_alphas(roots, lam), m.values(roots)
    return CFunctionValue.from_factors(
        beta_factor(ma / 2, -l - ma / 2 + 1, tol) for l, ma in zip(lams, mults) if ma > 0)


def c_pi0_minus_even_reciprocal(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet,
                                lam: np.ndarray) -> complex:
    """
    Polynomial 1/c_{Π₀}⁻ for even m: γ Π_α Π_{j=0}^{m_α/2-1} (λ_α + j) with
    γ = (-1)^{Σ m_α/2} [Π_α Γ(m_α/2)]⁻¹.
    """
    _require_even(m, 'reciprocal c_{Π₀}⁻')
    roots = parabolic(rs, th).complement_roots
    mults = m.values(roots)
    mults = mults[mults > 0]
    kept = roots[m.values(roots) > 0] if roots.size else roots
    sign = _sign_power(float(np.sum(mults)) / 2)
    log_norm = sum(log_gamma(ma / 2) for ma in mults)
    gamma_const = sign * np.exp(-log_norm)
    return complex(gamma_const * _rising_reciprocal(lambda_alphas(kept, lam), mults))


def _gk_factor(lam_a: complex, m_a: float, tol: float) -> Factor:
    """2^{-λ_α} Γ(λ_α) / (Γ((λ_α + m_α/2 + 1)/2) Γ((λ_α + m_α/2)/2))"""
    z = lam_a + m_a / 2
    log_num, order_num = gamma_factor(lam_a, tol)
    log_d1, order_d1 = gamma_factor((z + 1) / 2, tol)
    log_d2, order_d2 = gamma_factor(z / 2, tol)
    if order_num or order_d1 or order_d2:
        # duplication formula: the same factor is 2^{m/2-1} π^{-1/2} Γ(λ_α)/Γ(λ_α + m_α/2)
        log_ratio, order = gamma_ratio_factor(lam_a, z, tol)
        return log_ratio + (m_a / 2 - 1) * np.log(2.0) - 0.5 * np.log(np.pi), order
    return -lam_a * np.log(2.0) + log_num - log_d1 - log_d2, 0


def _gk_product(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, tol: float) -> CFunctionValue:
    roots = rs.positive_roots
    lams, mults = lambda_alphas(roots, lam), m.values(roots)
    return CFunctionValue.from_factors(_gk_factor(l, ma, tol) for l, ma in zip(lams, mults) if ma > 0)


@lru_cache(maxsize=None)
def _kappa0_cached(rs: RootSystem, m_key: tuple, m: MultiplicityFunction) -> complex:
    at_rho = _gk_product(rs, m, rho(rs, m), DEFAULT_NUMERICS.pole_tol)
    return 1.0 / at_rho.require_finite('coeffs', 'c at ρ')


def kappa0(rs: RootSystem, m: MultiplicityFunction) -> complex:
    """Normalizing constant κ₀ with c(ρ) = 1, computed once per (rs, m)"""
    return _kappa0_cached(rs, m.key(), m)


def c_hc(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, tol: float = None) -> CFunctionValue:
    """
    Harish-Chandra c-function by the Gindikin-Karpelevič product over Σ⁺,
    normalized so that c(ρ) = 1.
    """
    tol = DEFAULT_NUMERICS.pole_tol if tol is None else tol
    raw = _gk_product(rs, m, lam, tol)
    if raw.is_pole or raw.pole_order < 0:
        return raw
    return CFunctionValue(kappa0(rs, m) * raw.value, False, 0)
