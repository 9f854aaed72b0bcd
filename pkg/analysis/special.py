# analysis/special.py

from typing import Tuple

import numpy as np
from scipy.special import loggamma

from config.app_config import DEFAULT_NUMERICS

# A factor is (log of its finite part, order); order +1 marks a pole, -1 a zero.
Factor = Tuple[complex, int]


def nearest_nonpositive_integer(z: complex, tol: float) -> int:
    """Return n ≥ 0 with |z + n| ≤ tol, or -1 when z is not near a Gamma pole"""
    z = complex(z)
    n = int(round(-z.real))
    if n >= 0 and abs(z + n) <= tol:
        return n
    return -1


def is_gamma_pole(z: complex, tol: float = None) -> bool:
    tol = DEFAULT_NUMERICS.pole_tol if tol is None else tol
    return nearest_nonpositive_integer(z, tol) >= 0


def log_gamma(z: complex) -> complex:
    """Principal branch of log Γ for complex arguments"""
    return complex(loggamma(np.complex128(z)))


def gamma_factor(z: complex, tol: float = None) -> Factor:
    tol = DEFAULT_NUMERICS.pole_tol if tol is None else tol
    if is_gamma_pole(z, tol):
        return 0j, 1
    return log_gamma(z), 0


def gamma_ratio_factor(a: complex, b: complex, tol: float = None) -> Factor:
    """
    Γ(a)/Γ(b) as a factor.

    When a and b are both poles and b - a = k is an integer the ratio is
    finite and equals (-1)^k Γ(1-b)/Γ(1-a) by the reflection formula.
    """
    tol = DEFAULT_NUMERICS.pole_tol if tol is None else tol
    pole_a, pole_b = is_gamma_pole(a, tol), is_gamma_pole(b, tol)
    if pole_a and pole_b:
        k = int(round((b - a).real))
        log_value = log_gamma(1 - b) - log_gamma(1 - a)
        if k % 2:
            log_value += 1j * np.pi
        return log_value, 0
    if pole_a:
        return 0j, 1
    if pole_b:
        return 0j, -1
    return log_gamma(a) - log_gamma(b), 0


def beta_factor(x: complex, y: complex, tol: float = None) -> Factor:
    """B(x, y) = Γ(x)Γ(y)/Γ(x+y) as a factor"""
    log_ratio, order_ratio = gamma_ratio_factor(y, x + y, tol)
    log_x, order_x = gamma_factor(x, tol)
    return log_ratio + log_x, order_ratio + order_x


def complex_gamma(z: complex, tol: float = None) -> complex:
    """Γ(z) for complex z; returns complex infinity at poles"""
    log_value, order = gamma_factor(z, tol)
    if order > 0:
        return complex(np.inf, 0.0)
    return complex(np.exp(log_value))


def complex_beta(x: complex, y: complex, tol: float = None) -> complex:
    log_value, order = beta_factor(x, y, tol)
    if order > 0:
        return complex(np.inf, 0.0)
    if order < 0:
        return 0j
    return complex(np.exp(log_value))
