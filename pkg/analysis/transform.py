# analysis/transform.py

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from analysis.coeffs import (MultiplicityFunction, c_theta_minus, c_theta_plus, d_theta, delta_density,
                             weyl_denominator)
from analysis.errors import CapExceededError, ConvergenceError, DomainError, InvalidSpecError, PoleError
from analysis.rootsys import RootSystem, ThetaSet, a_theta_contains, dominant_representative, parabolic, \
    weyl_group
from analysis.thetasph import e_theta, theta_spherical
from config.app_config import DEFAULT_NUMERICS, DEFAULT_QUADRATURE

BUMP_KINDS = ('exp', 'polynomial', 'gaussian')

SpectralInput = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Tensor Gauss-Legendre nodes in a box, restricted to 𝔞_Θ.

    Integrals over the positive chamber of W_Θ-invariant integrands are
    ``weight_factor * Σ weights · integrand(nodes)``.
    """
    theta: ThetaSet
    nodes: np.ndarray
    weights: np.ndarray
    box_lo: np.ndarray
    box_hi: np.ndarray
    weight_factor: float
    order: int = 0

    @classmethod
    def build(cls, rs: RootSystem, th: ThetaSet, radius: float, nodes_per_axis: Optional[int] = None) -> 'RadialGrid':
        """
        Args:
            rs: Root system
            th: Domain selector; nodes are kept in 𝔞_Θ
            radius: Half side of the box [-R, R]^r
            nodes_per_axis: Gauss-Legendre order per coordinate

        Returns:
            RadialGrid: Grid whose box contains the ball of the given radius
        """
        if radius <= 0:
            raise InvalidSpecError('transform', 'radial box radius must be positive', str(radius))
        n = nodes_per_axis or DEFAULT_QUADRATURE.radial_nodes
        r = rs.rank
        lo = np.full(r, -float(radius))
        hi = np.full(r, float(radius))
        if r == 1 and th.is_empty:
            lo[0] = 0.0
        x, w = leggauss(n)
        axes = [0.5 * (hi[i] - lo[i]) * x + 0.5 * (hi[i] + lo[i]) for i in range(r)]
        scales = [0.5 * (hi[i] - lo[i]) * w for i in range(r)]
        nodes = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, r)
        weights = np.array([np.prod(c) for c in itertools.product(*scales)], dtype=float)

        complement = parabolic(rs, th).complement_roots
        if complement.size:
            inside = np.all(nodes @ complement.T > 0, axis=1)
            nodes, weights = nodes[inside], weights[inside]
        group_order = len(parabolic(rs, th).subgroup)
        return cls(theta=th, nodes=nodes, weights=weights, box_lo=lo, box_hi=hi, weight_factor=1.0 / group_order,
                   order=n)

    def scaled(self, factor: float) -> 'RadialGrid':
        """The same nodes with all weights multiplied by ``factor``"""
        return RadialGrid(self.theta, self.nodes, self.weights * factor, self.box_lo, self.box_hi,
                          self.weight_factor, self.order)

    def to_dict(self) -> dict:
        return {'theta': self.theta.label(), 'nodes': len(self.nodes),
                'box_lo': self.box_lo.tolist(), 'box_hi': self.box_hi.tolist()}


def fundamental_weights(rs: RootSystem) -> np.ndarray:
    """Rows ϖ_i with 2⟨ϖ_i, α_j⟩/⟨α_j, α_j⟩ = δ_ij"""
    simple = rs.simple_roots
    coroots = 2 * simple / np.einsum('ij,ij->i', simple, simple)[:, None]
    return np.linalg.inv(coroots).T


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """
    Imaginary spectral nodes λ = iξ with trapezoid weights.

    ξ runs over spacing·(weight lattice) inside the ball of radius ``cutoff``;
    in rank one the lattice is shifted by one half so that λ = 0 is avoided.
    The node set is symmetric under W and under λ → -λ.
    """
    nodes: np.ndarray
    weights: np.ndarray
    spacing: float
    cutoff: float

    @classmethod
    def build(cls, rs: RootSystem, spacing: Optional[float] = None, cutoff: Optional[float] = None,
              cap: Optional[int] = None) -> 'SpectralGrid':
        spacing = spacing or DEFAULT_QUADRATURE.spectral_spacing
        cutoff = cutoff or DEFAULT_QUADRATURE.spectral_cutoff
        cap = cap or DEFAULT_NUMERICS.lattice_cap
        if spacing <= 0 or cutoff <= 0:
            raise InvalidSpecError('transform', 'invalid spectral grid', f"spacing={spacing}, cutoff={cutoff}")
        basis = spacing * fundamental_weights(rs)
        inverse = np.linalg.inv(basis)
        r = rs.rank
        shift = 0.5 if r == 1 else 0.0
        bounds = [int(np.ceil(cutoff * np.linalg.norm(inverse[:, i]))) + 1 for i in range(r)]
        estimate = int(np.prod([2 * b + 1 for b in bounds]))
        if estimate > cap:
            raise CapExceededError('transform', 'spectral lattice exceeds cap', f"count≈{estimate}, cap={cap}")
        coefficients = np.array(list(itertools.product(*[range(-b, b + 1) for b in bounds])), dtype=float)
        xi = (coefficients + shift) @ basis
        xi = xi[np.linalg.norm(xi, axis=1) <= cutoff * (1 + 1e-12)]
        weights = np.full(len(xi), abs(np.linalg.det(basis)))
        return cls(nodes=1j * xi, weights=weights, spacing=spacing, cutoff=cutoff)

    @classmethod
    def adaptive(cls, rs: RootSystem, integrand: Callable[[np.ndarray], np.ndarray], spacing: Optional[float] = None,
                 cutoff: Optional[float] = None, tolerance: Optional[float] = None,
                 max_doublings: Optional[int] = None) -> Tuple['SpectralGrid', np.ndarray]:
        """
        Double the cutoff until the integrand on the outer shell is below
        ``tolerance`` times its peak.

        Returns:
            The grid and the integrand values on its nodes

        Raises:
            ConvergenceError: If the doubling budget is exhausted
        """
        tolerance = tolerance or DEFAULT_QUADRATURE.cutoff_tolerance
        max_doublings = DEFAULT_QUADRATURE.max_cutoff_doublings if max_doublings is None else max_doublings
        cutoff = cutoff or DEFAULT_QUADRATURE.spectral_cutoff
        for _ in range(max_doublings + 1):
            grid = cls.build(rs, spacing, cutoff)
            values = integrand(grid.nodes)
            if grid.boundary_ratio(rs, values) <= tolerance:
                return grid, values
            cutoff *= 2
        raise ConvergenceError('transform', 'spectral integrand does not decay within the cutoff budget',
                               f"cutoff={cutoff / 2}")

    def shell(self, rs: RootSystem) -> np.ndarray:
        width = self.spacing * float(np.max(np.linalg.norm(fundamental_weights(rs), axis=1)))
        return np.linalg.norm(self.nodes.imag, axis=1) > self.cutoff - width

    def boundary_ratio(self, rs: RootSystem, values: np.ndarray) -> float:
        magnitudes = np.abs(np.nan_to_num(np.asarray(values), nan=0.0, posinf=0.0, neginf=0.0))
        peak = float(magnitudes.max()) if magnitudes.size else 0.0
        if peak == 0.0:
            return 0.0
        return float(magnitudes[self.shell(rs)].max(initial=0.0) / peak)

    def __len__(self) -> int:
        return len(self.nodes)

    def to_dict(self) -> dict:
        return {'nodes': len(self.nodes), 'spacing': self.spacing, 'cutoff': self.cutoff}


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """1 for t ≤ 0, 0 for t ≥ 1, C^∞ in between"""
    def _e(x):
        out = np.zeros_like(x)
        positive = x > 0
        out[positive] = np.exp(-1.0 / x[positive])
        return out
    up, down = _e(1 - t), _e(t)
    return up / (up + down)


@dataclass(frozen=True, eq=False)
class CompactFunction:
    """
    W-invariant test function on 𝔞 with declared support box.

    ``evaluator`` maps an (n, r) array of points to n values.
    """
    evaluator: Callable[[np.ndarray], np.ndarray]
    support_lo: np.ndarray
    support_hi: np.ndarray
    smoothness: str
    name: str = 'f'
    support_radius: Optional[float] = None

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray(self.evaluator(points), dtype=complex)

    @classmethod
    def bump(cls, rank: int, radius: float, kind: str = 'exp', width: float = 0.45,
             power: int = 4, name: Optional[str] = None) -> 'CompactFunction':
        """
        Radial bump supported in the ball of the given radius.

        kinds: ``exp`` exp(1 - 1/(1 - s²)), ``polynomial`` (1 - s²)^power,
        ``gaussian`` exp(-|H|²/2width²) times a smooth cutoff starting at 0.6R.
        """
        if kind not in BUMP_KINDS:
            raise InvalidSpecError('transform', 'unknown bump kind', kind)
        if radius <= 0:
            raise InvalidSpecError('transform', 'bump radius must be positive', str(radius))

        def evaluate(points: np.ndarray) -> np.ndarray:
            s2 = np.sum(points ** 2, axis=1) / radius ** 2
            inside = s2 < 1
            out = np.zeros(len(points))
            if kind == 'exp':
                out[inside] = np.exp(1 - 1 / (1 - s2[inside]))
            elif kind == 'polynomial':
                out[inside] = (1 - s2[inside]) ** power
            else:
                s = np.sqrt(s2[inside])
                gauss = np.exp(-s2[inside] * radius ** 2 / (2 * width ** 2))
                out[inside] = gauss * _smooth_step((s - 0.6) / 0.4)
            return out

        smoothness = 'C^inf' if kind != 'polynomial' else f"C^{power - 1}"
        return cls(evaluator=evaluate, support_lo=np.full(rank, -float(radius)),
                   support_hi=np.full(rank, float(radius)), smoothness=smoothness,
                   name=name or f"{kind}-bump(R={radius:g})", support_radius=float(radius))

    @classmethod
    def from_samples(cls, points: np.ndarray, values: np.ndarray, name: str = 'sampled') -> 'CompactFunction':
        """Piecewise linear interpolation of scattered samples, zero outside their hull"""
        from scipy.interpolate import LinearNDInterpolator

        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(values, dtype=float)
        if points.shape[0] != values.shape[0]:
            raise InvalidSpecError('transform', 'sample count mismatch', f"{points.shape[0]} != {values.shape[0]}")
        if points.shape[1] == 1:
            order = np.argsort(points[:, 0])
            xs, ys = points[order, 0], values[order]

            def evaluate(query):
                return np.interp(query[:, 0], xs, ys, left=0.0, right=0.0)
        else:
            interpolator = LinearNDInterpolator(points, values, fill_value=0.0)

            def evaluate(query):
                return interpolator(query)

        lo, hi = points.min(axis=0), points.max(axis=0)
        radius = float(np.max(np.linalg.norm(points, axis=1)))
        return cls(evaluator=evaluate, support_lo=lo, support_hi=hi, smoothness='C^0', name=name,
                   support_radius=radius)


def check_support(f: CompactFunction, grid: RadialGrid) -> None:
    """
    Raises:
        DomainError: If the support box leaves the grid box, or f is nonzero just outside its support
    """
    if np.any(f.support_lo < grid.box_lo - 1e-12) and not (grid.theta.rank == 1 and grid.theta.is_empty):
        raise DomainError('transform', 'support escapes grid', f"{f.support_lo} < {grid.box_lo}")
    if np.any(f.support_hi > grid.box_hi + 1e-12):
        raise DomainError('transform', 'support escapes grid', f"{f.support_hi} > {grid.box_hi}")
    r = len(f.support_hi)
    outside = np.vstack([np.eye(r) * (f.support_hi * 1.01 + 1e-9), -np.eye(r) * (np.abs(f.support_lo) * 1.01 + 1e-9)])
    if np.any(np.abs(f(outside)) > 1e-14):
        raise DomainError('transform', 'function does not vanish outside its declared support', f.name)


def check_invariance(rs: RootSystem, th: ThetaSet, f: CompactFunction, grid: RadialGrid, samples: int = 8) -> None:
    """
    Raises:
        InvalidSpecError: If f differs from f∘w on sampled nodes for some w in W_Θ
    """
    if len(grid.nodes) == 0:
        return
    picks = grid.nodes[np.linspace(0, len(grid.nodes) - 1, min(samples, len(grid.nodes))).astype(int)]
    base = f(picks)
    scale = max(float(np.abs(base).max()), 1e-300)
    for w in parabolic(rs, th).subgroup:
        moved = f(picks @ w.orthogonal.T)
        if np.max(np.abs(moved - base)) > 1e-10 * scale:
            raise InvalidSpecError('transform', 'function is not W_Θ-invariant', f"word={w.word}")


def _is_uniform(m: MultiplicityFunction, value: float) -> bool:
    return m.uniform() == value


def _orbit_exponents(group, lams: np.ndarray, points: np.ndarray):
    """Yields (det w, ⟨wλ, H⟩ matrix) over the group; rows follow λ, columns follow H"""
    for w in group:
        yield w.det, lams @ (points @ w.orthogonal).T


def theta_kernel(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lams: np.ndarray,
                 points: np.ndarray) -> np.ndarray:
    """
    φ_Θ(m;λ_k, exp H_j) as a (k, j) matrix for H_j in 𝔞_Θ.

    m ≡ 0 gives Σ_{W_Θ} e^{wλ(H)}, m ≡ 2 the alternating closed form; other
    multiplicities are evaluated pointwise at the W_Θ-dominant representative.
    Entries where the kernel is singular are NaN.
    """
    lams = np.atleast_2d(np.asarray(lams, dtype=complex))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    group = parabolic(rs, th).subgroup
    if m.is_zero:
        return sum(np.exp(e) for _, e in _orbit_exponents(group, lams, points))
    if _is_uniform(m, 2.0):
        sign = -1 if int(d_theta(rs, m, th)) % 2 else 1
        alternating = sum(det * np.exp(e) for det, e in _orbit_exponents(group, lams, points))
        pi_lam = np.prod(lams @ rs.positive_roots.T / np.einsum('ij,ij->i', rs.positive_roots, rs.positive_roots),
                         axis=1)
        delta = weyl_denominator(rs, points)
        with np.errstate(divide='ignore', invalid='ignore'):
            kernel = sign * alternating / (pi_lam[:, None] * delta[None, :])
        singular = (np.abs(pi_lam) <= DEFAULT_NUMERICS.pole_tol)[:, None] | \
            (np.abs(delta) <= DEFAULT_NUMERICS.pole_tol)[None, :]
        return np.where(singular, np.nan, kernel)

    kernel = np.full((len(lams), len(points)), np.nan, dtype=complex)
    theta_gens = th.indices
    for j, H in enumerate(points):
        H_dom = dominant_representative(rs, H, theta_gens)
        for k, lam in enumerate(lams):
            try:
                kernel[k, j] = theta_spherical(rs, m, th, lam, H_dom).value
            except (PoleError, DomainError):
                continue
    return kernel


def theta_transform_many(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, f: CompactFunction,
                         grid: RadialGrid, lams: np.ndarray, check: bool = True) -> np.ndarray:
    """
    F_Θf(m;λ) = ∫_{A⁺} f φ_Θ(m;λ) δ(m) for every row of ``lams``.

    Nodes where δ vanishes contribute nothing; a NaN entry marks λ at a pole.
    """
    if grid.theta != th:
        raise InvalidSpecError('transform', 'radial grid built for another Θ', f"{grid.theta.label()} != {th.label()}")
    if check:
        check_support(f, grid)
        check_invariance(rs, th, f, grid)
    values = f(grid.nodes)
    density = delta_density(rs, m, grid.nodes)
    active = (np.abs(values) > 0) & (density > 0)
    weights = grid.weight_factor * grid.weights[active] * values[active] * density[active]
    lams = np.atleast_2d(np.asarray(lams, dtype=complex))
    if not np.any(active):
        return np.zeros(len(lams), dtype=complex)
    kernel = theta_kernel(rs, m, th, lams, grid.nodes[active])
    with np.errstate(invalid='ignore'):
        result = kernel @ weights
    bad_rows = np.any(~np.isfinite(kernel), axis=1)
    result[bad_rows] = np.nan
    return result


def theta_transform(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, f: CompactFunction, grid: RadialGrid,
                    lam: np.ndarray) -> complex:
    """
    Θ-spherical transform of f at a single λ.

    Raises:
        PoleError: If the kernel is singular at λ
        DomainError: If the support of f escapes the grid
    """
    value = theta_transform_many(rs, m, th, f, grid, np.atleast_2d(lam))[0]
    if not np.isfinite(value):
        raise PoleError('transform', 'λ at a pole of the Θ-spherical function', f"λ={lam}")
    return complex(value)


def refinement_error(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, f: CompactFunction, grid: RadialGrid,
                     lam: np.ndarray) -> float:
    """|F(grid) - F(coarser grid)| with half the nodes per axis"""
    radius = float(grid.box_hi[0])
    coarse = RadialGrid.build(rs, th, radius, max(2, grid.order // 2))
    fine_value = theta_transform(rs, m, th, f, grid, lam)
    coarse_value = theta_transform(rs, m, th, f, coarse, lam)
    return abs(fine_value - coarse_value)


def opdam_transform(rs: RootSystem, m: MultiplicityFunction, f: CompactFunction, grid: RadialGrid,
                    lam: np.ndarray) -> complex:
    """Opdam transform: the Θ-spherical transform with Θ = Π"""
    return theta_transform(rs, m, ThetaSet.full(rs.rank), f, grid, lam)


def euclidean_transform(rs: RootSystem, f: CompactFunction, grid: RadialGrid, lams: np.ndarray) -> np.ndarray:
    """∫_𝔞 f(H) e^{λ(H)} dH by direct quadrature on a Θ = Π grid"""
    if not grid.theta.is_full:
        raise InvalidSpecError('transform', 'Euclidean transform needs a full-box grid', grid.theta.label())
    lams = np.atleast_2d(np.asarray(lams, dtype=complex))
    return np.exp(lams @ grid.nodes.T) @ (grid.weights * f(grid.nodes))


def euclidean_kappa(rs: RootSystem) -> float:
    """Inversion constant for m = 0 with Lebesgue measure in orthonormal coordinates"""
    return 1.0 / (len(weyl_group(rs)) * (2 * np.pi) ** rs.rank)


def plancherel_density_many(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lams: np.ndarray) -> np.ndarray:
    """
    |c_Θ⁺(λ)c_Θ⁻(λ)|⁻² for every row of ``lams``.

    For even m this is Π_{α∈Σ⁺} Π_{h=0}^{m_α/2-1} |λ_α + h|²; it vanishes on
    walls where c_Θ has a pole.
    """
    lams = np.atleast_2d(np.asarray(lams, dtype=complex))
    if m.is_even:
        positive = rs.positive_roots
        lam_alphas = lams @ positive.T / np.einsum('ij,ij->i', positive, positive)
        density = np.ones(len(lams))
        for column, m_a in enumerate(m.values(positive)):
            for h in range(int(m_a) // 2):
                density *= np.abs(lam_alphas[:, column] + h) ** 2
        return density
    return np.array([plancherel_density(rs, m, th, lam) for lam in lams])


def plancherel_density(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lam_imaginary: np.ndarray) -> float:
    """
    Raises:
        DomainError: If λ is not purely imaginary
        PoleError: If c_Θ vanishes at λ
    """
    lam = np.asarray(lam_imaginary, dtype=complex)
    if np.max(np.abs(lam.real)) > 1e-12:
        raise DomainError('transform', 'Plancherel density needs imaginary λ', f"λ={lam}")
    if m.is_even:
        return float(plancherel_density_many(rs, m, th, lam[None, :])[0])
    plus = c_theta_plus(rs, m, th, lam)
    minus = c_theta_minus(rs, m, th, lam)
    if plus.is_pole or minus.is_pole:
        return 0.0
    value = abs(plus.value * minus.value)
    if value == 0.0:
        raise PoleError('transform', 'c_Θ vanishes at λ', f"λ={lam}")
    return float(value ** -2)


def _e_theta_kernel(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, lams: np.ndarray,
                    points: np.ndarray) -> np.ndarray:
    """E_Θ(m;-λ_k, exp H_j); for even m this is (-1)^{d(Θ,m)} φ_Π(m;-λ, exp H)"""
    full = ThetaSet.full(rs.rank)
    if m.is_even and (m.is_zero or _is_uniform(m, 2.0)):
        sign = -1 if int(d_theta(rs, m, th)) % 2 else 1
        return sign * theta_kernel(rs, m, full, -lams, points)
    kernel = np.full((len(lams), len(points)), np.nan, dtype=complex)
    for j, H in enumerate(points):
        for k, lam in enumerate(lams):
            try:
                kernel[k, j] = e_theta(rs, m, th, -lam, H)
            except (PoleError, DomainError):
                continue
    return kernel


@dataclass(frozen=True)
class InversionResult:
    values: np.ndarray
    skipped_nodes: int
    used_nodes: int


def _spectral_values(g: SpectralInput, sgrid: SpectralGrid) -> np.ndarray:
    values = g(sgrid.nodes) if callable(g) else np.asarray(g)
    values = np.asarray(values, dtype=complex)
    if values.shape != (len(sgrid),):
        raise InvalidSpecError('transform', 'spectral data does not match grid', f"{values.shape} vs {len(sgrid)}")
    return values


def invert_many(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, g: SpectralInput, sgrid: SpectralGrid,
                points: np.ndarray, kappa: float = 1.0) -> InversionResult:
    """
    κ (|W|/|W_Θ|) Σ_nodes g(λ) E_Θ(m;-λ, exp H) |c_Θ(m;λ)|⁻² w for every H.

    Nodes where the density vanishes or the data is singular are skipped.

    Raises:
        DomainError: If a point lies outside 𝔞_Θ
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    for H in points:
        if not a_theta_contains(rs, th, H):
            raise DomainError('transform', 'inversion point outside 𝔞_Θ', f"Θ={th.label()}, H={H}")
    values = _spectral_values(g, sgrid)
    density = plancherel_density_many(rs, m, th, sgrid.nodes)
    kernel = _e_theta_kernel(rs, m, th, sgrid.nodes, points)
    usable = (density > 0) & np.isfinite(values) & np.all(np.isfinite(kernel), axis=1)
    ratio = len(weyl_group(rs)) / len(parabolic(rs, th).subgroup)
    weights = sgrid.weights[usable] * density[usable] * values[usable]
    result = kappa * ratio * (weights @ kernel[usable])
    return InversionResult(values=result, skipped_nodes=int(np.sum(~usable)), used_nodes=int(np.sum(usable)))


def invert(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, g: SpectralInput, sgrid: SpectralGrid,
           H: np.ndarray, kappa: float = 1.0) -> complex:
    return complex(invert_many(rs, m, th, g, sgrid, np.atleast_2d(H), kappa).values[0])


def fit_kappa(reconstructed: np.ndarray, reference: np.ndarray, min_norm: float = 1e-8) -> Tuple[float, float]:
    """
    Least-squares scalar κ with κ·reconstructed ≈ reference.

    Returns:
        (κ, relative L∞ residual)

    Raises:
        ConvergenceError: If the data is too small to fit
    """
    reconstructed = np.asarray(reconstructed, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    norm = float(np.vdot(reconstructed, reconstructed).real)
    if norm <= min_norm ** 2 or float(np.max(np.abs(reference))) <= min_norm:
        raise ConvergenceError('transform', 'calibration is ill-conditioned', f"norm={np.sqrt(norm):.3g}")
    kappa = float(np.vdot(reconstructed, reference).real / norm)
    residual = float(np.max(np.abs(kappa * reconstructed - reference)) / np.max(np.abs(reference)))
    return kappa, residual


def sample_points(rs: RootSystem, th: ThetaSet, radius: float, count: int = 7) -> np.ndarray:
    """Interior points of 𝔞_Θ on a ray through a regular element, within the given radius"""
    direction = fundamental_weights(rs).sum(axis=0)
    direction = direction / np.linalg.norm(direction)
    if rs.rank > 1:
        # tilt off symmetric lines so the points stay regular for the full group
        direction = direction + 0.1 * fundamental_weights(rs)[0] / np.linalg.norm(fundamental_weights(rs)[0])
        direction = direction / np.linalg.norm(direction)
    ts = np.linspace(0.15, 0.85, count) * radius
    points = ts[:, None] * direction[None, :]
    return np.array([p for p in points if a_theta_contains(rs, th, p)])


def wave_packet_many(rs: RootSystem, m: MultiplicityFunction, g: SpectralInput, sgrid: SpectralGrid,
                     points: np.ndarray, decay_tolerance: float = 1e-6) -> np.ndarray:
    """
    ∫ g(λ) φ_Π(m;-λ, exp H) |c_Π⁺(m;λ)|⁻² dλ on the spectral grid.

    Raises:
        ConvergenceError: If g·density does not decay on the grid boundary
    """
    full = ThetaSet.full(rs.rank)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = _spectral_values(g, sgrid)
    density = plancherel_density_many(rs, m, full, sgrid.nodes)
    if sgrid.boundary_ratio(rs, values * density) > decay_tolerance:
        raise ConvergenceError('transform', 'wave packet data does not decay on the grid boundary',
                               f"ratio={sgrid.boundary_ratio(rs, values * density):.3g}")
    kernel = theta_kernel(rs, m, full, -sgrid.nodes, points) if (m.is_zero or _is_uniform(m, 2.0)) \
        else _e_theta_kernel(rs, m, full, sgrid.nodes, points)
    usable = (density > 0) & np.isfinite(values) & np.all(np.isfinite(kernel), axis=1)
    weights = sgrid.weights[usable] * density[usable] * values[usable]
    return weights @ kernel[usable]


def wave_packet(rs: RootSystem, m: MultiplicityFunction, g: SpectralInput, sgrid: SpectralGrid,
                H: np.ndarray) -> complex:
    return complex(wave_packet_many(rs, m, g, sgrid, np.atleast_2d(H))[0])


def theta_wave_packet(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, g: SpectralInput, sgrid: SpectralGrid,
                      H: np.ndarray) -> complex:
    """
    The wave packet restricted to 𝔞_Θ.

    Raises:
        DomainError: If H lies outside 𝔞_Θ
    """
    H = np.asarray(H, dtype=float)
    if not a_theta_contains(rs, th, H):
        raise DomainError('transform', 'H outside 𝔞_Θ', f"Θ={th.label()}, H={H}")
    return wave_packet(rs, m, g, sgrid, H)


def energy_ratio(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, f: CompactFunction, grid: RadialGrid,
                 sgrid: SpectralGrid, transform_values: np.ndarray, kappa: float) -> float:
    """
    κ(|W|/|W_Θ|) Σ |F_Θf|² |c_Θ|⁻² w divided by ∫_{A⁺} |f|² δ(m).

    A finite-grid diagnostic only.
    """
    values = f(grid.nodes)
    radial = grid.weight_factor * float(np.sum(grid.weights * np.abs(values) ** 2 * delta_density(rs, m, grid.nodes)))
    density = plancherel_density_many(rs, m, th, sgrid.nodes)
    usable = np.isfinite(transform_values) & (density > 0)
    ratio = len(weyl_group(rs)) / len(parabolic(rs, th).subgroup)
    spectral = kappa * ratio * float(np.sum(sgrid.weights[usable] * np.abs(transform_values[usable]) ** 2
                                            * density[usable]))
    if radial == 0.0:
        raise ConvergenceError('transform', 'zero radial energy', f.name)
    return spectral / radial


@dataclass(frozen=True)
class Calibration:
    kappa: float
    residual: float
    skipped_nodes: int
    sample_points: np.ndarray


def calibrate_kappa(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, grids: Tuple[RadialGrid, SpectralGrid],
                    reference: CompactFunction, points: Optional[np.ndarray] = None) -> Calibration:
    """
    Least-squares κ matching invert∘theta_transform(reference) to reference.

    Args:
        grids: Radial and spectral grid used for both directions
        reference: Test function, W_Θ-invariant with support inside the radial box
        points: Sample points in 𝔞_Θ; by default interior points within half the support radius

    Raises:
        PoleError: If the reference transform is singular on a node where the density does not vanish
        ConvergenceError: If the fit is ill-conditioned
    """
    radial, spectral = grids
    if points is None:
        radius = 0.5 * (reference.support_radius or float(np.min(reference.support_hi)))
        points = sample_points(rs, th, radius)
    values = theta_transform_many(rs, m, th, reference, radial, spectral.nodes)
    density = plancherel_density_many(rs, m, th, spectral.nodes)
    if np.any(~np.isfinite(values) & (density > 0)):
        raise PoleError('transform', 'reference transform is singular on the spectral grid', reference.name)
    raw = invert_many(rs, m, th, values, spectral, points, kappa=1.0)
    kappa, residual = fit_kappa(raw.values, reference(points))
    return Calibration(kappa=kappa, residual=residual, skipped_nodes=raw.skipped_nodes, sample_points=points)


@dataclass(frozen=True)
class RoundTrip:
    points: np.ndarray
    reconstructed: np.ndarray
    reference: np.ndarray
    max_relative_error: float
    energy_ratio: float
    skipped_nodes: int


def roundtrip(rs: RootSystem, m: MultiplicityFunction, th: ThetaSet, grids: Tuple[RadialGrid, SpectralGrid],
              f: CompactFunction, kappa: float, points: Optional[np.ndarray] = None) -> RoundTrip:
    """Transform f, invert with the given κ and compare at sample points of 𝔞_Θ"""
    radial, spectral = grids
    if points is None:
        radius = 0.5 * (f.support_radius or float(np.min(f.support_hi)))
        points = sample_points(rs, th, radius)
    values = theta_transform_many(rs, m, th, f, radial, spectral.nodes)
    inverted = invert_many(rs, m, th, values, spectral, points, kappa)
    reference = f(points)
    scale = float(np.max(np.abs(reference)))
    if scale == 0.0:
        raise ConvergenceError('transform', 'function vanishes on all sample points', f.name)
    error = float(np.max(np.abs(inverted.values - reference)) / scale)
    ratio = energy_ratio(rs, m, th, f, radial, spectral, values, kappa)
    return RoundTrip(points=points, reconstructed=inverted.values, reference=reference, max_relative_error=error,
                     energy_ratio=ratio, skipped_nodes=inverted.skipped_nodes)
