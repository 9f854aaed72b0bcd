# analysis/paleywiener.py

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from analysis.coeffs import MultiplicityFunction, e_theta_minus
from analysis.errors import InvalidSpecError, PoleError
from analysis.rootsys import RootSystem, ThetaSet, WeylElement, lambda_alphas, parabolic
from config.app_config import DEFAULT_PALEY_WIENER, PaleyWienerConfig

SpectralFunction = Callable[[np.ndarray], complex]

_PERTURBATION = 1e-7


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """
    Compact convex set in 𝔞: a centred ball or the hull of finitely many points.

    Hull generators must be W_Θ-stable; use ``orbit_hull`` to build one.
    """
    kind: str
    radius: float = 0.0
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ('ball', 'hull'):
            raise InvalidSpecError('paleywiener', 'unknown convex body kind', self.kind)
        if self.kind == 'ball' and self.radius < 0:
            raise InvalidSpecError('paleywiener', 'negative ball radius', str(self.radius))
        if self.kind == 'hull' and (self.points is None or len(self.points) == 0):
            raise InvalidSpecError('paleywiener', 'hull needs generators', '')

    @classmethod
    def ball(cls, radius: float) -> 'ConvexBody':
        return cls('ball', radius=float(radius))

    @classmethod
    def hull(cls, points: np.ndarray) -> 'ConvexBody':
        return cls('hull', points=np.atleast_2d(np.asarray(points, dtype=float)))

    @classmethod
    def orbit_hull(cls, rs: RootSystem, th: ThetaSet, H: np.ndarray) -> 'ConvexBody':
        """conv W_Θ(H)"""
        H = np.asarray(H, dtype=float)
        return cls.hull(np.array([w.act(H) for w in parabolic(rs, th).subgroup]))

    def is_stable(self, rs: RootSystem, th: ThetaSet, tol: float = 1e-9) -> bool:
        if self.kind == 'ball':
            return True
        for w in parabolic(rs, th).subgroup:
            moved = self.points @ w.orthogonal.T
            distances = np.linalg.norm(moved[:, None, :] - self.points[None, :, :], axis=2)
            if np.any(distances.min(axis=1) > tol):
                return False
        return True

    def to_dict(self) -> dict:
        if self.kind == 'ball':
            return {'kind': 'ball', 'radius': self.radius}
        return {'kind': 'hull', 'points': self.points.tolist()}


def support_function(C: ConvexBody, xi: np.ndarray) -> float:
    """q_C(ξ) = sup_{H∈C} ξ(H)"""
    xi = np.real(np.asarray(xi, dtype=complex))
    if C.kind == 'ball':
        return float(C.radius * np.linalg.norm(xi))
    return float(np.max(C.points @ xi))


def _unit(direction: np.ndarray) -> np.ndarray:
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise InvalidSpecError('paleywiener', 'zero direction', '')
    return direction / norm


@dataclass(frozen=True)
class ExpTypeEstimate:
    direction: Tuple[float, ...]
    slope: float
    radii: Tuple[float, ...]
    log_values: Tuple[float, ...]


def _log_abs(value: complex) -> float:
    magnitude = abs(complex(value))
    return float(np.log(magnitude)) if magnitude > 0 and np.isfinite(magnitude) else float('nan')


def exponential_type_estimate(g: SpectralFunction, directions: Sequence[np.ndarray], radii: Sequence[float],
                              prefactor: Optional[SpectralFunction] = None,
                              imaginary_offset: Optional[np.ndarray] = None) -> List[ExpTypeEstimate]:
    """
    Least-squares slope of s ↦ log|prefactor·g|(sσ + iτ) along real rays.

    Samples where the value is zero or not finite are dropped.

    Raises:
        InvalidSpecError: If fewer than two usable samples remain on a ray
    """
    estimates = []
    for direction in directions:
        sigma = _unit(direction)
        offset = np.zeros_like(sigma) if imaginary_offset is None else np.asarray(imaginary_offset, dtype=float)
        logs = []
        for s in radii:
            lam = s * sigma + 1j * offset
            value = _log_abs(g(lam))
            if prefactor is not None:
                value += _log_abs(prefactor(lam))
            logs.append(value)
        logs = np.array(logs)
        s_values = np.asarray(radii, dtype=float)
        usable = np.isfinite(logs)
        if usable.sum() < 2:
            raise InvalidSpecError('paleywiener', 'too few finite samples for a slope', f"direction={sigma}")
        slope, _ = np.polyfit(s_values[usable], logs[usable], 1)
        estimates.append(ExpTypeEstimate(tuple(sigma.tolist()), float(slope), tuple(float(s) for s in radii),
                                         tuple(float(v) for v in logs)))
    return estimates


@dataclass(frozen=True)
class DecayEstimate:
    direction: Tuple[float, ...]
    order: float
    nus: Tuple[float, ...]
    envelope: Tuple[float, ...]


def _windowed_envelope(values: np.ndarray, window: int) -> np.ndarray:
    """Running maximum over a centred window; removes zeros of oscillating samples"""
    half = window // 2
    padded = np.pad(values, half, mode='edge')
    return np.array([padded[i:i + window].max() for i in range(len(values))])


def decay_order_estimate(g: SpectralFunction, directions: Sequence[np.ndarray], nu_max: float,
                         nu_min: float = 1.0, samples: int = 64, window: int = 9) -> List[DecayEstimate]:
    """
    Fitted polynomial decay order along imaginary rays λ = iνσ.

    The order is minus the slope of log envelope|g| against log ν, with the
    envelope a running maximum over ``window`` geometric samples.
    """
    if not 0 < nu_min < nu_max:
        raise InvalidSpecError('paleywiener', 'invalid decay sampling range', f"[{nu_min}, {nu_max}]")
    nus = np.geomspace(nu_min, nu_max, samples)
    estimates = []
    for direction in directions:
        sigma = _unit(direction)
        magnitudes = np.array([abs(complex(g(1j * nu * sigma))) for nu in nus])
        envelope = _windowed_envelope(magnitudes, window)
        usable = (envelope > 0) & np.isfinite(envelope)
        if usable.sum() < 2:
            raise InvalidSpecError('paleywiener', 'too few finite samples for a decay fit', f"direction={sigma}")
        # fit over the outer half, where the asymptotic regime starts
        tail = usable & (nus >= np.sqrt(nu_min * nu_max))
        if tail.sum() < 2:
            tail = usable
        slope, _ = np.polyfit(np.log(nus[tail]), np.log(envelope[tail]), 1)
        estimates.append(DecayEstimate(tuple(sigma.tolist()), float(-slope), tuple(nus.tolist()),
                                       tuple(envelope.tolist())))
    return estimates


def alternate_representatives(rs: RootSystem, th: ThetaSet, shift: int = 1) -> Tuple[WeylElement, ...]:
    """Other representatives u·v of the cosets W_Θ v, with u cycling through W_Θ"""
    par = parabolic(rs, th)
    subgroup = par.subgroup
    reps = []
    for i, v in enumerate(par.coset_reps):
        u = subgroup[(i + shift) % len(subgroup)]
        reps.append(WeylElement(matrix=u.matrix @ v.matrix, orthogonal=u.orthogonal @ v.orthogonal,
                                word=u.word + v.word))
    return tuple(reps)


@dataclass(frozen=True)
class PAverageValue:
    value: complex
    perturbed: bool


def p_average_checked(rs: RootSystem, th: ThetaSet, g: SpectralFunction, lam: np.ndarray,
                      representatives: Optional[Sequence[WeylElement]] = None) -> PAverageValue:
    """
    Σ_{v∈W_Θ\\W} g(vλ); a node where g is not finite is perturbed once.

    Raises:
        PoleError: If g is not finite at the perturbed node either
    """
    lam = np.asarray(lam, dtype=complex)
    reps = parabolic(rs, th).coset_reps if representatives is None else representatives

    def _sum(point):
        return complex(sum(complex(g(v.act(point))) for v in reps))

    value = _sum(lam)
    if np.isfinite(value):
        return PAverageValue(value, False)
    shift = _PERTURBATION * (1 + 0.5j) * np.linspace(1.0, 2.0, rs.rank)
    value = _sum(lam + shift)
    if not np.isfinite(value):
        raise PoleError('paleywiener', 'g has a pole at a P-average node', f"λ={lam}")
    return PAverageValue(value, True)


def p_average(rs: RootSystem, th: ThetaSet, g: SpectralFunction, lam: np.ndarray,
              representatives: Optional[Sequence[WeylElement]] = None) -> complex:
    return p_average_checked(rs, th, g, lam, representatives).value


@dataclass(frozen=True)
class HyperplaneResidual:
    root: Tuple[float, ...]
    level: int
    mismatch: float
    growth: float
    residual: float
    passed: bool


def singular_hyperplanes(rs: RootSystem, m: MultiplicityFunction) -> List[Tuple[np.ndarray, int]]:
    """Pairs (α, k) of λ_α = k with α ∈ Σ⁺ and |k| ≤ max(m_α/2 - 1, 0)"""
    if not m.is_even:
        raise InvalidSpecError('paleywiener', 'entirety test needs even m', m.label())
    planes = []
    for alpha, m_a in zip(rs.positive_roots, m.values(rs.positive_roots)):
        top = max(int(m_a) // 2 - 1, 0)
        planes.extend((alpha, k) for k in range(-top, top + 1))
    return planes


def _base_point(rs: RootSystem, alpha: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Generic point on λ_α = k"""
    rng = np.random.default_rng(seed)
    point = 0.3 * rng.standard_normal(rs.rank) + 0.7j * rng.standard_normal(rs.rank)
    return point + (k - lambda_alphas(alpha[None, :], point)[0]) * alpha


def _side_limit(distances: np.ndarray, values: np.ndarray) -> complex:
    """Quadratic extrapolation to distance 0 from the three closest samples"""
    order = np.argsort(distances)[:3]
    x, y = distances[order], values[order]
    real = np.polyfit(x, y.real, len(x) - 1)
    imag = np.polyfit(x, y.imag, len(x) - 1)
    return complex(real[-1], imag[-1])


def pav_entirety_test(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, g: SpectralFunction,
                      ladder: Optional[Sequence[float]] = None, tolerance: Optional[float] = None,
                      seed: int = 7) -> List[HyperplaneResidual]:
    """
    Test P^av g across the hyperplanes where it could be singular.

    Each hyperplane is approached along ±α from a generic base point at the
    ladder distances. The mismatch is the gap between the two extrapolated
    one-sided limits, the growth the 1/ε coefficient of a fit
    a/ε + b + cε + dε² + eε³, both relative to the largest sample.
    """
    ladder = np.asarray(DEFAULT_PALEY_WIENER.ladder if ladder is None else ladder, dtype=float)
    tolerance = DEFAULT_PALEY_WIENER.mismatch_tolerance if tolerance is None else tolerance
    results = []
    for index, (alpha, k) in enumerate(singular_hyperplanes(rs, m)):
        base = _base_point(rs, alpha, k, seed + index)
        signed = np.concatenate([ladder, -ladder])
        values = np.array([p_average(rs, th, g, base + eps * alpha) for eps in signed])
        scale = float(np.max(np.abs(values)))
        if scale == 0.0 or not np.isfinite(scale):
            mismatch = growth = 0.0 if scale == 0.0 else float('inf')
        else:
            upper = _side_limit(ladder, values[:len(ladder)])
            lower = _side_limit(ladder, values[len(ladder):])
            mismatch = abs(upper - lower) / scale
            design = np.stack([1 / signed, np.ones_like(signed), signed, signed ** 2, signed ** 3], axis=1)
            coefficients, *_ = np.linalg.lstsq(design.astype(complex), values, rcond=None)
            growth = float(abs(coefficients[0]) / (scale * ladder.min()))
        residual = mismatch + growth
        results.append(HyperplaneResidual(tuple(alpha.tolist()), int(k), float(mismatch), float(growth),
                                          float(residual), bool(residual <= tolerance)))
    return results


@dataclass
class PWReport:
    exp_type_estimates: List[dict]
    decay_orders: List[dict]
    pav_residuals: List[dict]
    verdict: str
    margins: dict
    body: dict
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'exp_type_estimates': self.exp_type_estimates,
            'decay_orders': self.decay_orders,
            'pav_residuals': self.pav_residuals,
            'verdict': self.verdict,
            'margins': self.margins,
            'body': self.body,
            'heuristic': True,
            'notes': self.notes,
        }


def pw_report(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, g: SpectralFunction, body: ConvexBody,
              directions: Sequence[np.ndarray], radii: Sequence[float], nu_max: float,
              config: Optional[PaleyWienerConfig] = None, pav: bool = True, seed: int = 7) -> PWReport:
    """
    Exponential type against q_C, decay order and P^av entirety in one report.

    The verdict passes when every slope is within the relative tolerance of
    q_C, every decay order reaches the minimum and every hyperplane residual
    is below the mismatch tolerance.
    """
    config = config or DEFAULT_PALEY_WIENER
    if not body.is_stable(rs, th):
        raise InvalidSpecError('paleywiener', 'convex body is not W_Θ-stable', th.label())
    prefactor = (lambda lam: e_theta_minus(rs, m, th, lam)) if m.is_even else None
    notes = ['finite sampling only; exponential type and decay are estimated, not proven']

    exp_entries, exp_margin = [], float('inf')
    for estimate in exponential_type_estimate(g, directions, radii, prefactor):
        expected = support_function(body, np.array(estimate.direction))
        deviation = abs(estimate.slope - expected) / expected if expected > 0 else abs(estimate.slope)
        exp_margin = min(exp_margin, config.exp_type_tolerance - deviation)
        exp_entries.append({'direction': list(estimate.direction), 'slope': estimate.slope,
                            'support_value': expected, 'relative_deviation': deviation,
                            'radii': list(estimate.radii), 'log_values': list(estimate.log_values)})

    decay_entries, decay_margin = [], float('inf')
    for estimate in decay_order_estimate(g, directions, nu_max):
        decay_margin = min(decay_margin, estimate.order - config.min_decay_order)
        decay_entries.append({'direction': list(estimate.direction), 'order': estimate.order,
                              'nus': list(estimate.nus), 'envelope': list(estimate.envelope)})

    pav_entries, pav_margin = [], float('inf')
    if pav and m.is_even:
        for result in pav_entirety_test(rs, m, th, g, config.ladder, config.mismatch_tolerance, seed):
            pav_margin = min(pav_margin, config.mismatch_tolerance - result.residual)
            pav_entries.append({'root': list(result.root), 'level': result.level, 'mismatch': result.mismatch,
                                'growth': result.growth, 'residual': result.residual, 'passed': result.passed})
    elif pav:
        notes.append('P-average entirety test skipped: multiplicity is not even')

    margins = {'exp_type': exp_margin, 'decay_order': decay_margin, 'pav': pav_margin}
    verdict = 'pass' if all(value >= 0 for value in margins.values()) else 'fail'
    return PWReport(exp_type_estimates=exp_entries, decay_orders=decay_entries, pav_residuals=pav_entries,
                    verdict=verdict, margins=margins, body=body.to_dict(), notes=notes)
