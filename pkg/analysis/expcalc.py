# analysis/expcalc.py

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from analysis.coeffs import d_theta, delta_density, MultiplicityFunction, pi_poly, weyl_denominator
from analysis.errors import DomainError, InvalidSpecError, PoleError
from analysis.rootsys import RootSystem, ThetaSet, parabolic
from config.app_config import DEFAULT_NUMERICS

_KEY_DIGITS = 12
_ZERO = 1e-14

Term = Tuple[complex, Tuple[complex, ...]]
RadialFunction = Callable[[np.ndarray], np.ndarray]


def _key(exponent: Iterable[complex]) -> Tuple[Tuple[float, float], ...]:
    return tuple((round(complex(x).real, _KEY_DIGITS), round(complex(x).imag, _KEY_DIGITS)) for x in exponent)


@dataclass(frozen=True)
class ExpSum:
    """
    Finite exponential sum Σ c_μ e^{μ} divided by Δ^k.

    Exponents are complex vectors in orthonormal coordinates; equal exponents
    are merged and vanishing coefficients dropped on construction.
    """
    terms: Tuple[Term, ...]
    denom_power: int = 0

    def __post_init__(self):
        if self.denom_power < 0:
            raise InvalidSpecError('expcalc', 'negative Δ power', str(self.denom_power))

    @classmethod
    def build(cls, terms: Iterable[Tuple[complex, Iterable[complex]]], denom_power: int = 0) -> 'ExpSum':
        merged: Dict[tuple, List] = {}
        for coefficient, exponent in terms:
            exponent = tuple(complex(x) for x in exponent)
            entry = merged.setdefault(_key(exponent), [0j, exponent])
            entry[0] += complex(coefficient)
        scale = max((abs(c) for c, _ in merged.values()), default=0.0)
        kept = tuple((c, e) for c, e in merged.values() if abs(c) > _ZERO * max(scale, 1.0))
        kept = tuple(sorted(kept, key=lambda term: _key(term[1])))
        return cls(kept, denom_power)

    @classmethod
    def exponential(cls, lam: np.ndarray, coefficient: complex = 1.0) -> 'ExpSum':
        return cls.build([(coefficient, np.atleast_1d(lam))])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: 'ExpSum') -> 'ExpSum':
        if self.denom_power != other.denom_power:
            raise InvalidSpecError('expcalc', 'adding sums with different Δ powers',
                                   f"{self.denom_power} != {other.denom_power}")
        return ExpSum.build(self.terms + other.terms, self.denom_power)

    def scale(self, factor: complex) -> 'ExpSum':
        return ExpSum.build(((factor * c, e) for c, e in self.terms), self.denom_power)

    def __mul__(self, other: 'ExpSum') -> 'ExpSum':
        products = ((c1 * c2, tuple(a + b for a, b in zip(e1, e2)))
                    for c1, e1 in self.terms for c2, e2 in other.terms)
        return ExpSum.build(products, self.denom_power + other.denom_power)

    def numerator(self, H: np.ndarray) -> complex:
        H = np.atleast_1d(np.asarray(H, dtype=float))
        return complex(sum(c * np.exp(np.array(e) @ H) for c, e in self.terms))

    def evaluate(self, rs: RootSystem, H: np.ndarray) -> complex:
        """Numerator at H divided by Δ(exp H)^k"""
        value = self.numerator(H)
        if self.denom_power == 0:
            return value
        delta = complex(weyl_denominator(rs, np.atleast_1d(H)))
        if abs(delta) <= DEFAULT_NUMERICS.pole_tol:
            raise DomainError('expcalc', 'Δ vanishes at H', f"H={H}")
        return value / delta ** self.denom_power


def directional_derivative(rs: RootSystem, es: ExpSum, alpha: np.ndarray) -> ExpSum:
    """
    ∂_α with ∂_α e^{μ} = μ_α e^{μ}, μ_α = ⟨μ,α⟩/⟨α,α⟩.

    Raises:
        InvalidSpecError: If the sum still carries a Δ denominator
    """
    if es.denom_power:
        raise InvalidSpecError('expcalc', 'derivatives are applied before Δ division',
                               f"denom_power={es.denom_power}")
    alpha = np.asarray(alpha, dtype=float)
    norm = float(alpha @ alpha)
    return ExpSum.build((c * complex(np.array(e) @ alpha) / norm, e) for c, e in es.terms)


def product_of_derivatives(rs: RootSystem, es: ExpSum) -> ExpSum:
    """Π_{α∈Σ⁺} ∂_α"""
    for alpha in rs.positive_roots:
        es = directional_derivative(rs, es, alpha)
    return es


# Rank one: exponents are scalars in the variable z = α(H), Δ(z) = e^z - e^{-z}

_DELTA = ExpSum.build([(1.0, (1.0,)), (-1.0, (-1.0,))])
_DELTA_PRIME = ExpSum.build([(1.0, (1.0,)), (1.0, (-1.0,))])


def _require_rank_one(es: ExpSum) -> None:
    if any(len(e) != 1 for _, e in es.terms):
        raise InvalidSpecError('expcalc', 'A1 shift operators act on rank-one sums', '')


def _d_dz(es: ExpSum) -> ExpSum:
    return ExpSum.build((c * e[0], e) for c, e in es.terms)


def _numerator_only(es: ExpSum) -> ExpSum:
    return ExpSum(es.terms, 0)


def divide_by_delta(es: ExpSum) -> ExpSum:
    """
    Lower the Δ power by dividing the numerator exactly.

    Terms are grouped by exponent class modulo 2; in each class the numerator
    is e^{μ₀z} P(e^{2z}), and Δ = e^{-z}(e^{2z} - 1) divides it iff P(1) = 0.
    If any class fails, the sum is returned unchanged.
    """
    _require_rank_one(es)
    if es.denom_power == 0 or es.is_zero:
        return es
    classes: Dict[tuple, List[Tuple[int, complex]]] = {}
    bases: Dict[tuple, complex] = {}
    for c, (mu,) in es.terms:
        shift = np.floor(mu.real / 2 + 1e-9)
        base = mu - 2 * shift
        key = _key((base,))
        bases.setdefault(key, base)
        classes.setdefault(key, []).append((int(round(shift)), c))

    quotient = []
    for key, members in classes.items():
        low = min(j for j, _ in members)
        degree = max(j for j, _ in members) - low
        poly = np.zeros(degree + 1, dtype=complex)
        for j, c in members:
            poly[j - low] += c
        scale = max(np.abs(poly).max(), 1.0)
        if abs(poly.sum()) > 1e-10 * scale:
            return es
        # synthetic division by (x - 1), coefficients in ascending powers
        q = np.zeros(degree, dtype=complex)
        carry = 0j
        for power in range(degree, 0, -1):
            carry += poly[power]
            q[power - 1] = carry
        mu0 = bases[key] + 2 * low
        quotient.extend((q[j], (mu0 + 2 * j + 1,)) for j in range(degree))
    return divide_by_delta(ExpSum.build(quotient, es.denom_power - 1))


def _derivative_rational(es: ExpSum) -> ExpSum:
    """d/dz of N/Δ^k as (N'Δ - kNΔ')/Δ^{k+1}"""
    numerator = _numerator_only(es)
    if es.denom_power == 0:
        return _d_dz(numerator)
    k = es.denom_power
    combined = _d_dz(numerator) * _DELTA + (numerator * _DELTA_PRIME).scale(-k)
    return ExpSum(combined.terms, k + 1)


def a1_g_plus(es: ExpSum) -> ExpSum:
    """G₊ = -Δ⁻¹ d/dz, independent of the multiplicity"""
    _require_rank_one(es)
    derivative = _derivative_rational(es)
    raised = ExpSum(derivative.terms, derivative.denom_power + 1).scale(-1)
    return divide_by_delta(raised)


def a1_g_minus(m: float, es: ExpSum) -> ExpSum:
    """G₋(m) = Δ d/dz + (m-1)(e^z + e^{-z})"""
    _require_rank_one(es)
    derivative = _derivative_rational(es)
    k = es.denom_power
    # Δ · (…)/Δ^{k+1} keeps the numerator over Δ^k
    first = ExpSum(derivative.terms, k) if k else ExpSum((_DELTA * derivative).terms, 0)
    second = ExpSum((_numerator_only(es) * _DELTA_PRIME).scale(m - 1).terms, k)
    return divide_by_delta(first + second)


def _require_even(m: float) -> int:
    if m < 0 or not float(m).is_integer() or int(m) % 2:
        raise InvalidSpecError('expcalc', 'shift operators need even m', f"m={m}")
    return int(m)


def a1_d_plus(m: float, es: ExpSum) -> ExpSum:
    """D₊(m) = G₊^{m/2}: maps e^{λz} to Φ_λ(m)/c_Π⁺(m;-λ)"""
    for _ in range(_require_even(m) // 2):
        es = a1_g_plus(es)
    return es


def a1_d_minus(m: float, es: ExpSum) -> ExpSum:
    """D₋(m) = G₋(2) ∘ G₋(4) ∘ … ∘ G₋(m): maps Φ_λ(m) to e^{λz}/c_Π⁺(m;λ)"""
    for step in range(_require_even(m), 0, -2):
        es = a1_g_minus(step, es)
    return es


def a1_shift_adjoint_residual(rs: RootSystem, m: float, f: RadialFunction, df: RadialFunction, g: RadialFunction,
                              dg: RadialFunction, radius: float, nodes: int = 200) -> float:
    """
    Relative gap between ∫ (G₊f) g δ(m+2) dz and ∫ f (G₋(m+2)g) δ(m) dz on (0, R).

    f and g must vanish at z = R, and f should be even so that G₊f stays
    smooth at 0; the two sides then agree after one integration by parts.
    """
    if rs.rank != 1:
        raise InvalidSpecError('expcalc', 'shift operators are rank-one only', f"rank={rs.rank}")
    if radius <= 0:
        raise InvalidSpecError('expcalc', 'support radius must be positive', str(radius))
    x, w = leggauss(nodes)
    z = 0.5 * radius * (x + 1)
    w = 0.5 * radius * w
    delta, delta_prime = 2 * np.sinh(z), 2 * np.cosh(z)
    points = z[:, None]
    g_plus_f = -df(z) / delta
    g_minus_g = delta * dg(z) + (m + 1) * delta_prime * g(z)
    lhs = np.sum(w * g_plus_f * g(z) * delta_density(rs, MultiplicityFunction.constant(rs, m + 2), points))
    rhs = np.sum(w * f(z) * g_minus_g * delta_density(rs, MultiplicityFunction.constant(rs, m), points))
    scale = max(abs(lhs), abs(rhs))
    return float(abs(lhs - rhs) / scale) if scale > 0 else 0.0


def phi_second_kind_expsum(lam: complex) -> ExpSum:
    """Φ_λ(2) = e^{λz}/Δ in rank one"""
    return ExpSum.build([(1.0, (complex(lam),))], 1)


def complex_theta_closed_form(rs: RootSystem, th: ThetaSet, lam: np.ndarray, H: np.ndarray) -> complex:
    """
    φ_Θ(2;λ, exp H) through the derivative pipeline.

    Since π(wλ) = det(w)π(λ), Π_{α∈Σ⁺}∂_α maps Σ_{w∈W_Θ} e^{wλ} to
    π(λ) Σ_{w∈W_Θ} det(w) e^{wλ}, and
    φ_Θ(2;λ) = (-1)^{d(Θ,2)} (Π∂_α Σ e^{wλ})(H) / (π(λ)² Δ(exp H)).

    Raises:
        PoleError: If π(λ) vanishes
        DomainError: If H lies on a root wall
    """
    lam = np.asarray(lam, dtype=complex)
    H = np.asarray(H, dtype=float)
    pi_lam = pi_poly(rs, lam)
    if abs(pi_lam) <= DEFAULT_NUMERICS.pole_tol:
        raise PoleError('expcalc', 'π(λ) vanishes', f"λ={lam}")
    orbit_sum = ExpSum.build((1.0, w.act(lam)) for w in parabolic(rs, th).subgroup)
    numerator = product_of_derivatives(rs, orbit_sum)
    sign = -1 if int(d_theta(rs, MultiplicityFunction.constant(rs, 2.0), th)) % 2 else 1
    value = ExpSum(numerator.terms, 1).evaluate(rs, H)
    return sign * value / pi_lam ** 2
