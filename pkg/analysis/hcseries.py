# analysis/hcseries.py

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from analysis.coeffs import MultiplicityFunction, rho
from analysis.errors import DomainError, InvalidSpecError, NonGenericError
from analysis.rootsys import LatticeVector, RootSystem, is_dominant, lattice_array
from config.app_config import DEFAULT_NUMERICS


@dataclass(frozen=True, eq=False)
class GammaTable:
    """
    Harish-Chandra coefficients Γ_μ(m;λ) for every μ in Λ of height ≤ order.

    Rows of ``coeffs`` are lattice vectors in height order; ``values[i]`` is
    the coefficient of ``coeffs[i]``. The first row is μ = 0 with Γ₀ = 1.
    """
    rs: RootSystem
    mult: MultiplicityFunction
    lam: np.ndarray
    order: int
    coeffs: np.ndarray
    values: np.ndarray

    @property
    def heights(self) -> np.ndarray:
        return self.coeffs.sum(axis=1)

    @property
    def entries(self) -> Dict[LatticeVector, complex]:
        return {LatticeVector(tuple(int(c) for c in row)): complex(v) for row, v in zip(self.coeffs, self.values)}

    def get(self, mu) -> complex:
        """Coefficient at ``mu`` given as a LatticeVector or coefficient tuple"""
        key = tuple(mu.coeffs) if isinstance(mu, LatticeVector) else tuple(int(c) for c in mu)
        index = _index_of(self.coeffs).get(key)
        if index is None:
            raise InvalidSpecError('hcseries', 'lattice vector outside table', f"μ={key}, order={self.order}")
        return complex(self.values[index])


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    terms_used: int


def _index_of(coeffs: np.ndarray) -> Dict[Tuple[int, ...], int]:
    return {tuple(int(c) for c in row): i for i, row in enumerate(coeffs)}


def _lam_key(lam: np.ndarray) -> Tuple[complex, ...]:
    return tuple(complex(x) for x in np.atleast_1d(lam))


def gamma_coeffs(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, N: int,
                 tol: float = None) -> GammaTable:
    """
    Solve the Harish-Chandra recursion up to height N.

    ⟨μ,μ-2λ⟩ Γ_μ = 2 Σ_{α∈Σ⁺} m_α Σ_{k≥1, μ-2kα∈Λ} Γ_{μ-2kα} ⟨μ+ρ-2kα-λ, α⟩

    Args:
        rs: Root system
        m: Multiplicity function
        lam: Spectral parameter (complex, orthonormal coordinates)
        N: Maximal height

    Returns:
        GammaTable: Coefficients in height order

    Raises:
        NonGenericError: If ⟨μ,μ-2λ⟩ vanishes for some 0 < height(μ) ≤ N
        CapExceededError: If the lattice exceeds the configured cap
    """
    tol = DEFAULT_NUMERICS.genericity_tol if tol is None else tol
    return _gamma_coeffs_cached(rs, m.key(), m, _lam_key(lam), int(N), float(tol))


@lru_cache(maxsize=256)
def _gamma_coeffs_cached(rs: RootSystem, m_key: tuple, m: MultiplicityFunction,
                         lam_key: Tuple[complex, ...], N: int, tol: float) -> GammaTable:
    lam = np.array(lam_key, dtype=complex)
    if lam.shape != (rs.rank,):
        raise InvalidSpecError('hcseries', 'spectral parameter has wrong dimension',
                               f"expected {rs.rank}, got {lam.shape}")
    coeffs = lattice_array(rs, N)
    index = _index_of(coeffs)
    simple = rs.simple_roots
    positive_coeffs = rs.positive_coeffs
    positive = rs.positive_roots
    weights = m.values(positive)
    rho_vec = rho(rs, m)
    values = np.zeros(len(coeffs), dtype=complex)
    values[0] = 1.0

    for i in range(1, len(coeffs)):
        mu_c = coeffs[i]
        mu = mu_c @ simple
        lhs = complex(mu @ (mu - 2 * lam))
        if abs(lhs) <= tol:
            raise NonGenericError('hcseries', 'λ is not generic',
                                  f"⟨μ,μ-2λ⟩ = {lhs:.3g} at μ={tuple(int(c) for c in mu_c)}")
        rhs = 0j
        for alpha_c, alpha, m_a in zip(positive_coeffs, positive, weights):
            if m_a == 0:
                continue
            k = 1
            while True:
                lower = mu_c - 2 * k * alpha_c
                if np.any(lower < 0):
                    break
                gamma_lower = values[index[tuple(int(c) for c in lower)]]
                if gamma_lower != 0:
                    rhs += m_a * gamma_lower * complex((mu + rho_vec - 2 * k * alpha - lam) @ alpha)
                k += 1
        values[i] = 2 * rhs / lhs

    return GammaTable(rs=rs, mult=m, lam=lam, order=N, coeffs=coeffs, values=values)


def recursion_residual(table: GammaTable) -> float:
    """Largest relative residual of the recursion over the table"""
    rs, m, lam = table.rs, table.mult, table.lam
    index = _index_of(table.coeffs)
    simple = rs.simple_roots
    rho_vec = rho(rs, m)
    weights = m.values(rs.positive_roots)
    worst = 0.0
    for mu_c, gamma_mu in zip(table.coeffs[1:], table.values[1:]):
        mu = mu_c @ simple
        lhs = complex(mu @ (mu - 2 * lam)) * gamma_mu
        rhs = 0j
        scale = abs(lhs)
        for alpha_c, alpha, m_a in zip(rs.positive_coeffs, rs.positive_roots, weights):
            k = 1
            while np.all(mu_c - 2 * k * alpha_c >= 0):
                term = 2 * m_a * table.values[index[tuple(int(c) for c in mu_c - 2 * k * alpha_c)]] \
                    * complex((mu + rho_vec - 2 * k * alpha - lam) @ alpha)
                rhs += term
                scale = max(scale, abs(term))
                k += 1
        if scale > 0:
            worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def _tail_estimate(layer_sums: np.ndarray, q: float, safety: float) -> float:
    """
    Geometric tail from the observed decay of layer contributions.

    The ratio is taken over two heights, since odd layers vanish in many systems.
    """
    N = len(layer_sums) - 1
    ratios = []
    for h in range(max(2, (2 * N) // 3), N + 1):
        if layer_sums[h - 2] > 0 and layer_sums[h] > 0:
            ratios.append(np.sqrt(layer_sums[h] / layer_sums[h - 2]))
    ratio = max(ratios) if ratios else q
    ratio = max(ratio, 0.0)
    if ratio >= 1.0:
        return float('inf')
    last = float(max(layer_sums[-2:])) if N >= 1 else float(layer_sums[-1])
    return safety * last * ratio / (1.0 - ratio)


def phi_hc(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, H: np.ndarray, N: Optional[int] = None,
           table: Optional[GammaTable] = None, target: Optional[float] = None) -> SeriesValue:
    """
    Truncated Harish-Chandra series Φ_λ(m; exp H) = e^{(λ-ρ)(H)} Σ_{ht μ ≤ N} Γ_μ e^{-μ(H)}.

    With a relative ``target`` the order is doubled from N, up to
    ``max_series_order``, until tail_bound ≤ target·|value|. A supplied
    table fixes the order.

    Raises:
        DomainError: If H is not strictly dominant
        NonGenericError: If λ is not generic up to the order reached
    """
    H = np.asarray(H, dtype=float)
    if H.shape != (rs.rank,):
        raise InvalidSpecError('hcseries', 'torus point has wrong dimension', f"expected {rs.rank}, got {H.shape}")
    if not is_dominant(rs, H):
        raise DomainError('hcseries', 'H is not strictly dominant', f"α(H) = {rs.simple_roots @ H}")
    N = DEFAULT_NUMERICS.default_order if N is None else N
    lam = np.asarray(lam, dtype=complex)
    if table is not None:
        return _sum_series(rs, m, lam, H, table)

    series = _sum_series(rs, m, lam, H, gamma_coeffs(rs, m, lam, N))
    cap = max(N, DEFAULT_NUMERICS.max_series_order)
    while target is not None and series.tail_bound > target * abs(series.value) and N < cap:
        N = min(2 * max(N, 1), cap)
        series = _sum_series(rs, m, lam, H, gamma_coeffs(rs, m, lam, N))
    return series


def _sum_series(rs: RootSystem, m: MultiplicityFunction, lam: np.ndarray, H: np.ndarray,
                table: GammaTable) -> SeriesValue:
    exponents = np.exp(-(table.coeffs @ rs.simple_roots) @ H)
    terms = table.values * exponents
    prefactor = np.exp((lam - rho(rs, m)) @ H)

    layer_sums = np.zeros(table.order + 1)
    np.add.at(layer_sums, table.heights, np.abs(terms))
    q = float(np.max(np.exp(-rs.simple_roots @ H)))
    tail = abs(prefactor) * _tail_estimate(layer_sums, q, DEFAULT_NUMERICS.tail_safety)

    return SeriesValue(value=complex(prefactor * terms.sum()), tail_bound=float(tail), terms_used=len(terms))
