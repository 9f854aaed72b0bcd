# analysis/rootsys.py

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analysis.errors import CapExceededError, InvalidSpecError
from config.app_config import DEFAULT_NUMERICS

FAMILIES = ('A', 'B', 'C', 'D', 'E6', 'E7', 'E8', 'F4', 'G2')

# Simple roots of the exceptional types in ambient coordinates (Bourbaki order)
_E8_SIMPLE = (
    (0.5, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5, 0.5),
    (1, 1, 0, 0, 0, 0, 0, 0),
    (-1, 1, 0, 0, 0, 0, 0, 0),
    (0, -1, 1, 0, 0, 0, 0, 0),
    (0, 0, -1, 1, 0, 0, 0, 0),
    (0, 0, 0, -1, 1, 0, 0, 0),
    (0, 0, 0, 0, -1, 1, 0, 0),
    (0, 0, 0, 0, 0, -1, 1, 0),
)
EXCEPTIONAL_SIMPLE_ROOTS: Dict[str, Tuple[Tuple[float, ...], ...]] = {
    'E6': _E8_SIMPLE[:6],
    'E7': _E8_SIMPLE[:7],
    'E8': _E8_SIMPLE,
    'F4': (
        (0, 1, -1, 0),
        (0, 0, 1, -1),
        (0, 0, 0, 1),
        (0.5, -0.5, -0.5, -0.5),
    ),
    'G2': (
        (1, -1, 0),
        (-2, 1, 1),
    ),
}
EXCEPTIONAL_RANKS = {'E6': 6, 'E7': 7, 'E8': 8, 'F4': 4, 'G2': 2}
# Positive root counts, checked after closure
EXPECTED_POSITIVE = {'E6': 36, 'E7': 63, 'E8': 120, 'F4': 24, 'G2': 6}

_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RootSystem:
    """
    Reduced root system in orthonormal coordinates of 𝔞* (identified with 𝔞).

    Simple root i is row ``simple_roots[i]``; positive roots are stored both
    as integer coefficient vectors over the simple roots and as vectors.
    ``scale`` is the factor applied to the ambient realization, so the
    normalization of the inner product is explicit.
    """
    family: str
    rank: int
    ambient_simple: np.ndarray
    scale: float
    gram: np.ndarray
    cartan: np.ndarray
    simple_roots: np.ndarray
    positive_coeffs: np.ndarray

    @property
    def positive_roots(self) -> np.ndarray:
        return self.positive_coeffs @ self.simple_roots

    @property
    def roots(self) -> np.ndarray:
        pos = self.positive_roots
        return np.vstack([pos, -pos])

    @property
    def n_positive(self) -> int:
        return self.positive_coeffs.shape[0]

    @property
    def label(self) -> str:
        return self.family if self.family in EXCEPTIONAL_RANKS else f"{self.family}{self.rank}"

    @property
    def ambient_roots(self) -> np.ndarray:
        return self.scale * (self.positive_coeffs @ self.ambient_simple)

    def root_index(self, alpha: np.ndarray) -> int:
        """Index of a positive root, or -1 when ``alpha`` is not one"""
        diffs = np.abs(self.positive_roots - np.asarray(alpha, dtype=float)).max(axis=1)
        hits = np.nonzero(diffs < 1e-9)[0]
        return int(hits[0]) if hits.size else -1

    def is_root(self, alpha: np.ndarray) -> bool:
        alpha = np.asarray(alpha, dtype=float)
        return self.root_index(alpha) >= 0 or self.root_index(-alpha) >= 0

    def to_dict(self) -> dict:
        return {
            'family': self.family,
            'rank': self.rank,
            'scale': self.scale,
            'gram': self.gram.tolist(),
            'simple_roots': self.simple_roots.tolist(),
            'ambient_simple_roots': (self.scale * self.ambient_simple).tolist(),
            'positive_roots': self.positive_coeffs.tolist(),
        }


@dataclass(frozen=True)
class ThetaSet:
    """Subset Θ of the simple roots, stored as sorted 0-based indices"""
    indices: Tuple[int, ...]
    rank: int

    def __post_init__(self):
        if any(i < 0 or i >= self.rank for i in self.indices):
            raise InvalidSpecError('rootsys', 'Θ index out of range', f"indices={self.indices}, rank={self.rank}")
        if len(set(self.indices)) != len(self.indices):
            raise InvalidSpecError('rootsys', 'duplicate Θ index', f"indices={self.indices}")
        object.__setattr__(self, 'indices', tuple(sorted(self.indices)))

    @classmethod
    def full(cls, rank: int) -> 'ThetaSet':
        return cls(tuple(range(rank)), rank)

    @classmethod
    def empty(cls, rank: int) -> 'ThetaSet':
        return cls((), rank)

    @classmethod
    def parse(cls, text: str, rank: int) -> 'ThetaSet':
        """Parse ``full``, ``empty`` or a comma list of 1-based indices"""
        text = text.strip().lower()
        if text in ('full', 'pi', 'all'):
            return cls.full(rank)
        if text in ('empty', 'none', ''):
            return cls.empty(rank)
        try:
            labels = [int(part) for part in text.split(',') if part.strip()]
        except ValueError as e:
            raise InvalidSpecError('rootsys', 'unparseable Θ specification', text) from e
        return cls(tuple(label - 1 for label in labels), rank)

    @property
    def is_full(self) -> bool:
        return len(self.indices) == self.rank

    @property
    def is_empty(self) -> bool:
        return not self.indices

    def complement(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.rank) if i not in self.indices)

    def label(self) -> str:
        if self.is_full:
            return 'full'
        if self.is_empty:
            return 'empty'
        return ','.join(str(i + 1) for i in self.indices)


@dataclass(frozen=True, eq=False)
class WeylElement:
    """
    Weyl group element.

    ``matrix`` is the integer matrix acting on simple-root coordinates,
    ``orthogonal`` the same element on orthonormal coordinates.
    """
    matrix: np.ndarray
    orthogonal: np.ndarray
    word: Tuple[int, ...]

    @property
    def det(self) -> int:
        return -1 if len(self.word) % 2 else 1

    @property
    def length(self) -> int:
        return len(self.word)

    def act(self, vector: np.ndarray) -> np.ndarray:
        return self.orthogonal @ vector

    def key(self) -> bytes:
        return self.matrix.astype(np.int64).tobytes()


@dataclass(frozen=True, eq=False)
class Parabolic:
    """W_Θ, minimal representatives of W_Θ\\W, and the split of Σ⁺"""
    theta: ThetaSet
    subgroup: Tuple[WeylElement, ...]
    coset_reps: Tuple[WeylElement, ...]
    theta_roots: np.ndarray
    complement_roots: np.ndarray

    def factor(self, w: WeylElement) -> Tuple[WeylElement, WeylElement]:
        """Split ``w`` as u·v with u in W_Θ and v a coset representative"""
        members = {u.key(): u for u in self.subgroup}
        for v in self.coset_reps:
            u_matrix = np.rint(w.matrix @ np.linalg.inv(v.matrix)).astype(np.int64)
            u = members.get(u_matrix.tobytes())
            if u is not None:
                return u, v
        raise InvalidSpecError('rootsys', 'element outside W', f"word={w.word}")


def _ambient_simple_roots(family: str, rank: int) -> np.ndarray:
    if family == 'A':
        basis = np.eye(rank + 1)
        return np.array([basis[i] - basis[i + 1] for i in range(rank)])
    if family in ('B', 'C', 'D'):
        basis = np.eye(rank)
        rows = [basis[i] - basis[i + 1] for i in range(rank - 1)]
        if family == 'B':
            rows.append(basis[rank - 1])
        elif family == 'C':
            rows.append(2 * basis[rank - 1])
        else:
            rows.append(basis[rank - 2] + basis[rank - 1])
        return np.array(rows)
    return np.array(EXCEPTIONAL_SIMPLE_ROOTS[family], dtype=float)


def _validate_type(family: str, rank: int) -> None:
    if family == 'BC':
        raise InvalidSpecError('rootsys', 'non-reduced root system requested', 'BC is not reduced')
    if family not in FAMILIES:
        raise InvalidSpecError('rootsys', 'unsupported family', family)
    minimum = {'A': 1, 'B': 2, 'C': 2, 'D': 3}
    if family in EXCEPTIONAL_RANKS:
        if rank != EXCEPTIONAL_RANKS[family]:
            raise InvalidSpecError('rootsys', 'unsupported (family, rank)', f"{family} has rank {EXCEPTIONAL_RANKS[family]}")
    elif rank < minimum[family]:
        raise InvalidSpecError('rootsys', 'unsupported (family, rank)', f"{family}{rank} needs rank >= {minimum[family]}")


def _close_positive_roots(cartan: np.ndarray) -> np.ndarray:
    """Positive roots as coefficient vectors, by closing Π under simple reflections"""
    rank = cartan.shape[0]
    start = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    seen = set(start)
    queue = deque(start)
    while queue:
        coeffs = np.array(queue.popleft())
        for i in range(rank):
            pairing = int(cartan[i] @ coeffs)
            image = coeffs.copy()
            image[i] -= pairing
            key = tuple(int(c) for c in image)
            if all(c >= 0 for c in key) and key not in seen:
                seen.add(key)
                queue.append(key)
    return np.array(sorted(seen, key=lambda c: (sum(c), c)), dtype=np.int64)


@lru_cache(maxsize=None)
def build_root_system(family: str, rank: int) -> RootSystem:
    """
    Build a reduced root system in its standard realization.

    A1 is rescaled so that ⟨α,α⟩ = 1; every other type keeps the form of its
    ambient realization.

    Args:
        family: One of A, B, C, D, E6, E7, E8, F4, G2
        rank: The rank (must match the exceptional types)

    Returns:
        RootSystem: The constructed root system

    Raises:
        InvalidSpecError: Unsupported or non-reduced type
    """
    family = family.upper()
    _validate_type(family, rank)

    ambient = _ambient_simple_roots(family, rank)
    scale = 1.0 / np.sqrt(2.0) if (family == 'A' and rank == 1) else 1.0
    gram = scale ** 2 * (ambient @ ambient.T)
    cartan = np.rint(2 * gram / np.diag(gram)[:, None]).astype(np.int64)
    simple = np.linalg.cholesky(gram)
    positive = _close_positive_roots(cartan)

    if family in EXPECTED_POSITIVE and positive.shape[0] != EXPECTED_POSITIVE[family]:
        raise InvalidSpecError('rootsys', 'embedded root table inconsistent',
                               f"{family}: {positive.shape[0]} positive roots")

    rs = RootSystem(family=family, rank=rank, ambient_simple=ambient, scale=scale, gram=gram,
                    cartan=cartan, simple_roots=simple, positive_coeffs=positive)
    _check_reduced(rs)
    return rs


def _check_reduced(rs: RootSystem) -> None:
    roots = rs.roots
    for alpha in rs.positive_roots:
        if np.any(np.abs(roots - 2 * alpha).max(axis=1) < 1e-9):
            raise InvalidSpecError('rootsys', 'non-reduced root system', f"2α is a root for α={alpha}")


def weyl_group_order(rs: RootSystem) -> int:
    n = rs.rank
    if rs.family == 'A':
        return factorial(n + 1)
    if rs.family in ('B', 'C'):
        return 2 ** n * factorial(n)
    if rs.family == 'D':
        return 2 ** (n - 1) * factorial(n)
    return {'E6': 51840, 'E7': 2903040, 'E8': 696729600, 'F4': 1152, 'G2': 12}[rs.family]


def _simple_reflection_matrices(rs: RootSystem) -> List[np.ndarray]:
    eye = np.eye(rs.rank, dtype=np.int64)
    return [eye - np.outer(eye[i], rs.cartan[i]) for i in range(rs.rank)]


def _to_orthogonal(rs: RootSystem, matrix: np.ndarray) -> np.ndarray:
    lower = rs.simple_roots
    return lower.T @ matrix @ np.linalg.inv(lower.T)


def _generate(rs: RootSystem, generators: Sequence[int], cap: int) -> Tuple[WeylElement, ...]:
    reflections = _simple_reflection_matrices(rs)
    identity = np.eye(rs.rank, dtype=np.int64)
    elements = [(identity, ())]
    seen = {identity.tobytes()}
    queue = deque(elements)
    while queue:
        matrix, word = queue.popleft()
        for i in generators:
            image = reflections[i] @ matrix
            key = image.tobytes()
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > cap:
                raise CapExceededError('rootsys', 'Weyl group exceeds configured cap', f"cap={cap}")
            entry = (image, (i,) + word)
            elements.append(entry)
            queue.append(entry)
    return tuple(WeylElement(matrix=m, orthogonal=_to_orthogonal(rs, m), word=w) for m, w in elements)


@lru_cache(maxsize=None)
def _weyl_group_cached(rs: RootSystem, cap: int) -> Tuple[WeylElement, ...]:
    return _generate(rs, range(rs.rank), cap)


def weyl_group(rs: RootSystem, cap: Optional[int] = None) -> Tuple[WeylElement, ...]:
    """
    Enumerate W by breadth-first closure over simple reflections.

    The identity comes first and every word is reduced.

    Raises:
        CapExceededError: If |W| exceeds the cap
    """
    cap = cap or DEFAULT_NUMERICS.weyl_cap
    order = weyl_group_order(rs)
    if order > cap:
        raise CapExceededError('rootsys', 'Weyl group exceeds configured cap', f"|W|={order}, cap={cap}")
    return _weyl_group_cached(rs, cap)


@lru_cache(maxsize=None)
def parabolic(rs: RootSystem, th: ThetaSet) -> Parabolic:
    """
    Parabolic data for Θ: W_Θ, minimal coset representatives of W_Θ\\W,
    ⟨Θ⟩⁺ and Σ⁺∖⟨Θ⟩⁺.
    """
    if th.rank != rs.rank:
        raise InvalidSpecError('rootsys', 'Θ rank mismatch', f"Θ rank {th.rank}, system rank {rs.rank}")
    group = weyl_group(rs)
    subgroup = _generate(rs, th.indices, DEFAULT_NUMERICS.weyl_cap)

    # v is minimal in W_Θ v iff v⁻¹(α) > 0 for every α in Θ
    reps = []
    for v in group:
        inverse = np.rint(np.linalg.inv(v.matrix)).astype(np.int64)
        if all((inverse[:, i] >= 0).all() for i in th.indices):
            reps.append(v)

    outside = [i for i in range(rs.rank) if i not in th.indices]
    in_theta = ~np.any(rs.positive_coeffs[:, outside] > 0, axis=1) if outside else np.ones(rs.n_positive, bool)
    positive = rs.positive_roots
    return Parabolic(theta=th, subgroup=subgroup, coset_reps=tuple(reps),
                     theta_roots=positive[in_theta], complement_roots=positive[~in_theta])


def lambda_alpha(rs: RootSystem, lam: np.ndarray, alpha: np.ndarray) -> complex:
    """λ_α = ⟨λ,α⟩/⟨α,α⟩ with the bilinear extension to complex λ"""
    alpha = np.asarray(alpha, dtype=float)
    return complex(np.dot(alpha, np.asarray(lam)) / np.dot(alpha, alpha))


def lambda_alphas(roots: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Vectorized λ_α over the rows of ``roots``"""
    roots = np.asarray(roots, dtype=float)
    if roots.size == 0:
        return np.zeros(0, dtype=complex)
    return (roots @ np.asarray(lam, dtype=complex)) / np.einsum('ij,ij->i', roots, roots)


@dataclass(frozen=True)
class LatticeVector:
    """μ = Σ nⱼαⱼ with nonnegative integer coefficients"""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.coeffs):
            raise InvalidSpecError('rootsys', 'negative lattice coefficient', str(self.coeffs))

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    def vector(self, rs: RootSystem) -> np.ndarray:
        return np.array(self.coeffs, dtype=float) @ rs.simple_roots


def lattice_count(rank: int, max_height: int) -> int:
    return comb(max_height + rank, rank)


def lattice_array(rs: RootSystem, max_height: int, cap: Optional[int] = None) -> np.ndarray:
    """
    Coefficient array of every μ in Λ with height ≤ ``max_height``, sorted by
    height then lexicographically.

    Raises:
        CapExceededError: If the count exceeds the lattice cap
    """
    if max_height < 0:
        raise InvalidSpecError('rootsys', 'negative lattice height', str(max_height))
    cap = cap or DEFAULT_NUMERICS.lattice_cap
    count = lattice_count(rs.rank, max_height)
    if count > cap:
        raise CapExceededError('rootsys', 'lattice enumeration exceeds cap', f"count={count}, cap={cap}")

    rows = []

    # Within a height layer the order is (n₁, n₂, …) descending, so α₁ precedes α₂
    def _fill(prefix: List[int], remaining: int, slots: int):
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for first in range(remaining, -1, -1):
            _fill(prefix + [first], remaining - first, slots - 1)

    for height in range(max_height + 1):
        _fill([], height, rs.rank)
    return np.array(rows, dtype=np.int64).reshape(-1, rs.rank)


def lattice_enumerate(rs: RootSystem, max_height: int, cap: Optional[int] = None) -> List[LatticeVector]:
    return [LatticeVector(tuple(int(c) for c in row)) for row in lattice_array(rs, max_height, cap)]


def a_theta_contains(rs: RootSystem, th: ThetaSet, H: np.ndarray) -> bool:
    """H ∈ 𝔞_Θ iff α(H) > 0 for every α in Σ⁺∖⟨Θ⟩⁺"""
    complement = parabolic(rs, th).complement_roots
    if complement.size == 0:
        return True
    return bool(np.all(complement @ np.asarray(H, dtype=float) > 0))


def a_theta_contains_bruteforce(rs: RootSystem, th: ThetaSet, H: np.ndarray) -> bool:
    """Membership in the interior of the union of the W_Θ-translates of the closed chamber"""
    H = np.asarray(H, dtype=float)
    positive = rs.positive_roots
    for u in parabolic(rs, th).subgroup:
        if np.all(positive @ (u.orthogonal.T @ H) > 0):
            return True
    return False


def is_dominant(rs: RootSystem, H: np.ndarray, margin: float = 0.0) -> bool:
    return bool(np.all(rs.simple_roots @ np.asarray(H, dtype=float) > margin))


def dominant_representative(rs: RootSystem, H: np.ndarray,
                            generators: Optional[Sequence[int]] = None) -> np.ndarray:
    """Reflect H into the closed chamber of the group generated by ``generators``"""
    H = np.array(H, dtype=float)
    generators = range(rs.rank) if generators is None else generators
    simple = rs.simple_roots
    for _ in range(10 * rs.n_positive + 10):
        moved = False
        for i in generators:
            value = simple[i] @ H
            if value < -_TOL:
                H = H - 2 * value / (simple[i] @ simple[i]) * simple[i]
                moved = True
        if not moved:
            return H
    return H
