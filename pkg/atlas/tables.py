# atlas/tables.py

import hashlib
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import pandas as pd

from analysis.errors import InvalidSpecError

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
PAIRS_FILE = 'pairs.tsv'
ISOMORPHISMS_FILE = 'isomorphisms.tsv'

# sha256 of the embedded data files
CHECKSUMS = {
    PAIRS_FILE: 'ffd0741c29e0aeae9042ee368f077fa7c79447cc66335500b8fa028dabe4d34f',
    ISOMORPHISMS_FILE: '7f851d0dda5cae1bca6314d0c4e2543d19b4c8a0e38c9584cff77e0a00808f6c',
}

KLASSES = ('riemannian', 'ncc', 'keps2')
KLASS_TITLES = {
    'riemannian': 'Riemannian symmetric pairs with even multiplicities',
    'ncc': 'Non-compactly causal symmetric pairs with even multiplicities',
    'keps2': 'Other K_eps symmetric pairs with even multiplicities',
}
EXPECTED_COUNTS = {'riemannian': 12, 'ncc': 10, 'keps2': 11}
SIGMA_FAMILIES = ('A', 'B', 'C', 'D', 'E', 'F', 'G')


@dataclass(frozen=True)
class SymmetricPairRecord:
    """
    One row of the classification, possibly a family in n and j.

    ``rank_expr`` and ``multiplicity`` are integers or expressions in n;
    ``j_min``/``j_max`` are empty when the family has no j parameter.
    """
    klass: str
    g_label: str
    h_label: str
    fixed_algebra_label: str
    sigma_type: str
    rank_expr: str
    multiplicity: str
    n_min: str
    j_min: str
    j_max: str
    notes: str

    def __post_init__(self):
        if self.klass not in KLASSES:
            raise InvalidSpecError('atlas', 'unknown record class', self.klass)
        if self.sigma_type not in SIGMA_FAMILIES:
            raise InvalidSpecError('atlas', 'unknown root system family', self.sigma_type)
        if self.multiplicity.isdigit() and int(self.multiplicity) % 2:
            raise InvalidSpecError('atlas', 'odd multiplicity in the atlas', self.label)

    @property
    def label(self) -> str:
        return f"{self.g_label}/{self.h_label}"

    @property
    def is_family(self) -> bool:
        return bool(self.n_min)

    @property
    def has_j(self) -> bool:
        return bool(self.j_min)

    @property
    def fixed_multiplicity(self) -> int:
        """The multiplicity when it does not depend on n, else -1"""
        return int(self.multiplicity) if self.multiplicity.isdigit() else -1

    @property
    def parameter_constraints(self) -> str:
        parts = []
        if self.n_min:
            parts.append(f"n>={self.n_min}")
        if self.j_min:
            parts.append(f"{self.j_min}<=j<={self.j_max}")
        return ', '.join(parts)

    def to_dict(self) -> dict:
        return {
            'class': self.klass,
            'g': self.g_label,
            'h': self.h_label,
            'fixed_algebra': self.fixed_algebra_label,
            'sigma': self.sigma_type,
            'rank': self.rank_expr,
            'multiplicity': self.multiplicity,
            'constraints': self.parameter_constraints,
            'notes': self.notes,
        }


@dataclass(frozen=True)
class IsomorphismRecord:
    klass: str
    left_pair: Tuple[str, str]
    right_pair: Tuple[str, str]

    def to_dict(self) -> dict:
        return {'class': self.klass, 'left': '/'.join(self.left_pair), 'right': '/'.join(self.right_pair)}


def _read_verified(name: str) -> pd.DataFrame:
    path = os.path.join(DATA_DIR, name)
    with open(path, 'rb') as handle:
        payload = handle.read()
    digest = hashlib.sha256(payload).hexdigest()
    if digest != CHECKSUMS[name]:
        raise InvalidSpecError('atlas', 'embedded data checksum mismatch', f"{name}: {digest}")
    return pd.read_csv(path, sep='\t', dtype=str, keep_default_na=False, encoding='utf-8')


@lru_cache(maxsize=1)
def load_atlas() -> Tuple[Tuple[SymmetricPairRecord, ...], Tuple[IsomorphismRecord, ...]]:
    """
    Records of all three tables and their isomorphism lists.

    Raises:
        InvalidSpecError: If a data file fails its checksum or a table has the wrong size
    """
    pairs = _read_verified(PAIRS_FILE)
    records = tuple(SymmetricPairRecord(
        klass=row.klass, g_label=row.g, h_label=row.h, fixed_algebra_label=row.fixed, sigma_type=row.sigma,
        rank_expr=row.rank, multiplicity=row.multiplicity, n_min=row.n_min, j_min=row.j_min, j_max=row.j_max,
        notes=row.notes) for row in pairs.itertuples(index=False))

    for klass, expected in EXPECTED_COUNTS.items():
        count = sum(1 for record in records if record.klass == klass)
        if count != expected:
            raise InvalidSpecError('atlas', 'table size mismatch', f"{klass}: {count} != {expected}")

    isomorphisms = tuple(IsomorphismRecord(klass=row.klass, left_pair=(row.g_left, row.h_left),
                                           right_pair=(row.g_right, row.h_right))
                         for row in _read_verified(ISOMORPHISMS_FILE).itertuples(index=False))
    return records, isomorphisms
