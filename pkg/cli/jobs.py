# cli/jobs.py

import re
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from analysis.coeffs import MultiplicityFunction
from analysis.errors import InvalidSpecError
from analysis.rootsys import RootSystem, ThetaSet, build_root_system
from analysis.thetasph import METHODS
from analysis.transform import BUMP_KINDS

SUBCOMMANDS = ('eval', 'transform', 'invert', 'roundtrip', 'pw-check', 'atlas')
EVAL_QUANTITIES = ('theta', 'ho', 'phi_hc', 'e_theta', 'regularized', 'c_plus', 'c_minus', 'c', 'c_hc',
                   'delta', 'weyl_denominator')
# log|F| grows like s·R along a ray; these keep s·R below the float range
DEFAULT_RAY_SCALES = (100.0, 140.0, 180.0, 220.0, 260.0)
# quantities that depend on λ only, or on H only
LAMBDA_ONLY = ('c_plus', 'c_minus', 'c', 'c_hc')
H_ONLY = ('delta', 'weyl_denominator')
OUTPUT_FORMATS = ('json', 'csv')
ATLAS_CLASSES = {'riemannian': 'riemannian', 'ncc': 'ncc', 'keps2': 'keps2', 'kepsii': 'keps2'}


def parse_complex(text: str) -> complex:
    """Parse numbers such as ``2``, ``0+2i``, ``-1.5-0.5i`` or ``3j``"""
    cleaned = text.strip().replace(' ', '').replace('i', 'j')
    if cleaned.endswith('j') and re.fullmatch(r'[+-]?j', cleaned):
        cleaned = cleaned.replace('j', '1j')
    try:
        return complex(cleaned)
    except ValueError as e:
        raise InvalidSpecError('cli', 'unparseable complex number', text) from e


def parse_vector(text: str, rank: int, complex_valued: bool) -> np.ndarray:
    """Comma separated coordinates of a point in 𝔞 or 𝔞*_ℂ"""
    parts = [part for part in str(text).split(',') if part.strip()]
    if len(parts) != rank:
        raise InvalidSpecError('cli', 'vector has the wrong number of coordinates', f"'{text}' for rank {rank}")
    if complex_valued:
        return np.array([parse_complex(part) for part in parts], dtype=complex)
    try:
        return np.array([float(part) for part in parts], dtype=float)
    except ValueError as e:
        raise InvalidSpecError('cli', 'unparseable real vector', str(text)) from e


def parse_range(text: str) -> np.ndarray:
    """``start:stop:count`` as an evenly spaced rank-one grid"""
    try:
        start, stop, count = text.split(':')
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as e:
        raise InvalidSpecError('cli', 'range must be start:stop:count', text) from e
    if len(values) == 0:
        raise InvalidSpecError('cli', 'empty range', text)
    return values


def parse_multiplicity(rs: RootSystem, text: Any) -> MultiplicityFunction:
    """A single value, or ``long/short`` for two root lengths"""
    try:
        if isinstance(text, (int, float)):
            return MultiplicityFunction.constant(rs, float(text))
        parts = [float(part) for part in str(text).split('/')]
    except ValueError as e:
        raise InvalidSpecError('cli', 'unparseable multiplicity', str(text)) from e
    if len(parts) == 1:
        return MultiplicityFunction.constant(rs, parts[0])
    if len(parts) == 2:
        return MultiplicityFunction.by_length(rs, parts[0], parts[1])
    raise InvalidSpecError('cli', 'multiplicity takes one or two values', str(text))


@dataclass
class JobSpec:
    """One command line job; every field can also come from the --config file"""
    subcommand: str
    family: Optional[str] = None
    rank: Optional[int] = None
    m: Any = 2
    theta: str = 'full'
    quantity: str = 'theta'
    lambdas: List[str] = field(default_factory=list)
    H: List[str] = field(default_factory=list)
    H_range: Optional[str] = None
    N: Optional[int] = None
    method: str = 'auto'
    bump: str = 'gaussian'
    radius: float = 3.0
    width: float = 0.45
    reference_bump: str = 'gaussian'
    reference_width: float = 0.4
    samples_csv: Optional[str] = None
    radial_nodes: Optional[int] = None
    spectral_spacing: Optional[float] = None
    spectral_cutoff: Optional[float] = None
    kappa: Optional[float] = None
    directions: List[str] = field(default_factory=list)
    radii: List[float] = field(default_factory=list)
    nu_max: float = 40.0
    atlas_class: Optional[str] = None
    sigma: Optional[str] = None
    atlas_m: Optional[int] = None
    atlas_rank: Optional[int] = None
    n: Optional[int] = None
    j: Optional[int] = None
    output: Optional[str] = None
    format: str = 'json'
    workers: int = 1
    seed: int = 7
    use_cache: bool = True

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'JobSpec':
        """Build from a mapping, ignoring configuration sections such as ``numerics``"""
        known = {f.name for f in fields(cls)}
        if 'subcommand' not in data:
            raise InvalidSpecError('cli', 'job has no subcommand', '')
        return cls(**{key: value for key, value in data.items() if key in known})

    def merged(self, overrides: Dict[str, Any]) -> 'JobSpec':
        """A copy with every non-None override applied"""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({key: value for key, value in overrides.items() if value is not None and key in values})
        return JobSpec(**values)

    # Validation and typed accessors

    def validate(self) -> None:
        """
        Raises:
            InvalidSpecError: If the job is malformed or inconsistent
        """
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidSpecError('cli', 'unknown subcommand', str(self.subcommand))
        if self.format not in OUTPUT_FORMATS:
            raise InvalidSpecError('cli', 'unknown output format', str(self.format))
        if self.workers < 1:
            raise InvalidSpecError('cli', 'worker count must be positive', str(self.workers))
        if self.subcommand == 'atlas':
            if self.atlas_class is not None and self.atlas_class.lower() not in ATLAS_CLASSES:
                raise InvalidSpecError('cli', 'unknown atlas class', self.atlas_class)
            return

        rs = self.root_system()
        self.multiplicity(rs)
        self.theta_set(rs)
        if self.N is not None and self.N < 0:
            raise InvalidSpecError('cli', 'truncation order must be nonnegative', str(self.N))

        if self.subcommand == 'eval':
            if self.quantity not in EVAL_QUANTITIES:
                raise InvalidSpecError('cli', 'unknown quantity', self.quantity)
            if self.method != 'auto' and self.method not in METHODS:
                raise InvalidSpecError('cli', 'unknown evaluation method', self.method)
            if self.quantity not in H_ONLY and not self.lambdas:
                raise InvalidSpecError('cli', 'empty λ list', self.quantity)
            if self.quantity not in LAMBDA_ONLY and not self.H and not self.H_range:
                raise InvalidSpecError('cli', 'empty H list', self.quantity)
        if self.subcommand == 'transform' and not self.lambdas:
            raise InvalidSpecError('cli', 'empty λ list', 'transform')
        if self.subcommand == 'invert' and not self.H and not self.H_range:
            raise InvalidSpecError('cli', 'empty H list', 'invert')
        if self.subcommand in ('transform', 'invert', 'roundtrip', 'pw-check'):
            if self.bump not in BUMP_KINDS or self.reference_bump not in BUMP_KINDS:
                raise InvalidSpecError('cli', 'unknown bump kind', f"{self.bump}, {self.reference_bump}")
            if self.radius <= 0 or self.width <= 0:
                raise InvalidSpecError('cli', 'bump radius and width must be positive', f"{self.radius}, {self.width}")
        if self.subcommand == 'pw-check':
            if self.format == 'csv':
                raise InvalidSpecError('cli', 'pw-check reports are JSON only', self.format)
            if self.radii and len(self.radii) < 2:
                raise InvalidSpecError('cli', 'pw-check needs at least two radii', str(self.radii))
            if self.nu_max <= 1:
                raise InvalidSpecError('cli', 'nu_max must exceed 1', str(self.nu_max))
        self.lambda_points(rs)
        self.h_points(rs)
        self.direction_vectors(rs)

    def root_system(self) -> RootSystem:
        if self.family is None or self.rank is None:
            raise InvalidSpecError('cli', 'root system family and rank are required', '')
        return build_root_system(str(self.family), int(self.rank))

    def multiplicity(self, rs: RootSystem) -> MultiplicityFunction:
        return parse_multiplicity(rs, self.m)

    def theta_set(self, rs: RootSystem) -> ThetaSet:
        return ThetaSet.parse(str(self.theta), rs.rank)

    def lambda_points(self, rs: RootSystem) -> np.ndarray:
        points = [parse_vector(text, rs.rank, True) for text in self.lambdas]
        return np.array(points, dtype=complex).reshape(-1, rs.rank)

    def h_points(self, rs: RootSystem) -> np.ndarray:
        points = [parse_vector(text, rs.rank, False) for text in self.H]
        if self.H_range:
            if rs.rank != 1:
                raise InvalidSpecError('cli', 'H ranges are rank-one only', self.H_range)
            points.extend(np.array([t]) for t in parse_range(self.H_range))
        return np.array(points, dtype=float).reshape(-1, rs.rank)

    def direction_vectors(self, rs: RootSystem) -> List[np.ndarray]:
        if self.directions:
            return [parse_vector(text, rs.rank, False) for text in self.directions]
        # default: the direction of ρ for the unit multiplicity
        return [rs.positive_roots.sum(axis=0)]

    def ray_radii(self, support_radius: float) -> List[float]:
        return [float(s) for s in self.radii] or [s / support_radius for s in DEFAULT_RAY_SCALES]

    def atlas_klass(self) -> Optional[str]:
        return ATLAS_CLASSES[self.atlas_class.lower()] if self.atlas_class else None

    def grid_settings(self) -> Tuple[Optional[int], Optional[float], Optional[float]]:
        return self.radial_nodes, self.spectral_spacing, self.spectral_cutoff
