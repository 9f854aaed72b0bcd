# atlas/service.py

import ast
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from analysis.errors import InvalidSpecError
from analysis.rootsys import RootSystem, ThetaSet, build_root_system
from atlas.tables import CHECKSUMS, KLASS_TITLES, KLASSES, IsomorphismRecord, SymmetricPairRecord, load_atlas

KEPS2_NOTE = 'no Θ hint: the K_eps II signature is not part of the tables'
NCC_NOTE = 'Θ = Π∖{β} for one simple root β; the tables do not say which'

_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.USub, ast.UAdd,
                  ast.Constant, ast.Name, ast.Load)


def _evaluate(expression: str, n: Optional[int], j: Optional[int]) -> int:
    """Integer arithmetic in n and j with implicit products such as 2n or 2(n-j)"""
    text = re.sub(r'(\d)\s*([nj(])', r'\1*\2', expression.strip())
    tree = ast.parse(text, mode='eval')
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise InvalidSpecError('atlas', 'unsupported expression', expression)
        if isinstance(node, ast.Name) and node.id not in ('n', 'j'):
            raise InvalidSpecError('atlas', 'unknown parameter', f"{node.id} in {expression}")
    values = {'n': n, 'j': j}
    if any(values[node.id] is None for node in ast.walk(tree) if isinstance(node, ast.Name)):
        raise InvalidSpecError('atlas', 'parameter missing', expression)
    return int(eval(compile(tree, '<atlas>', 'eval'), {'__builtins__': {}}, values))


def _is_arithmetic(text: str) -> bool:
    return bool(re.fullmatch(r'[\dnj+\-() ]+', text))


def _split_arguments(text: str) -> List[str]:
    parts, depth, current = [], 0, ''
    for char in text:
        if char == ',' and depth == 0:
            parts.append(current)
            current = ''
            continue
        depth += char == '('
        depth -= char == ')'
        current += char
    parts.append(current)
    return parts


def concretize_label(label: str, n: Optional[int], j: Optional[int]) -> str:
    """Substitute n and j in every argument of a Lie algebra label"""
    factors = []
    for factor in label.split('×'):
        start = factor.find('(')
        if start < 0 or not factor.endswith(')'):
            factors.append(factor)
            continue
        arguments = [str(_evaluate(arg, n, j)) if _is_arithmetic(arg) else arg
                     for arg in _split_arguments(factor[start + 1:-1])]
        factors.append(f"{factor[:start]}({','.join(arguments)})")
    return '×'.join(factors)


def root_system_name(sigma_type: str, rank: int) -> str:
    return f"{sigma_type}{rank}" if sigma_type in ('E', 'F', 'G') else sigma_type


@dataclass(frozen=True)
class ConcretePair:
    record: SymmetricPairRecord
    n: Optional[int]
    j: Optional[int]
    g_label: str
    h_label: str
    fixed_algebra_label: str
    family: str
    rank: int
    multiplicity: int

    def root_system(self) -> RootSystem:
        return build_root_system(self.family, self.rank)

    def to_dict(self) -> dict:
        return {
            'class': self.record.klass,
            'g': self.g_label,
            'h': self.h_label,
            'fixed_algebra': self.fixed_algebra_label,
            'sigma': f"{self.record.sigma_type}{self.rank}",
            'rank': self.rank,
            'multiplicity': self.multiplicity,
            'n': self.n,
            'j': self.j,
        }


def concretize(record: SymmetricPairRecord, n: Optional[int] = None, j: Optional[int] = None) -> ConcretePair:
    """
    Instantiate a record at concrete parameters.

    Defaults are the smallest admissible n and j.

    Raises:
        InvalidSpecError: If n or j violate the record's constraints
    """
    if record.is_family:
        n = int(record.n_min) if n is None else n
        if n < int(record.n_min):
            raise InvalidSpecError('atlas', 'parameter out of range', f"{record.label} needs n>={record.n_min}")
    else:
        n = None
    if record.has_j:
        low, high = _evaluate(record.j_min, n, None), _evaluate(record.j_max.replace('[n/2]', str(n // 2)), n, None)
        j = low if j is None else j
        if not low <= j <= high:
            raise InvalidSpecError('atlas', 'parameter out of range', f"{record.label} needs {low}<=j<={high}")
    else:
        j = None
    return ConcretePair(
        record=record, n=n, j=j,
        g_label=concretize_label(record.g_label, n, j),
        h_label=concretize_label(record.h_label, n, j),
        fixed_algebra_label=concretize_label(record.fixed_algebra_label, n, j) if record.fixed_algebra_label else '',
        family=root_system_name(record.sigma_type, _evaluate(record.rank_expr, n, j)),
        rank=_evaluate(record.rank_expr, n, j),
        multiplicity=_evaluate(record.multiplicity, n, j))


def _minimal_rank(record: SymmetricPairRecord) -> int:
    n = int(record.n_min) if record.is_family else None
    return _evaluate(record.rank_expr, n, None)


def _parse_sigma(sigma: str) -> Tuple[str, Optional[int]]:
    match = re.fullmatch(r'([A-Ga-g])(\d*)', sigma.strip())
    if not match:
        raise InvalidSpecError('atlas', 'unparseable root system filter', sigma)
    return match.group(1).upper(), int(match.group(2)) if match.group(2) else None


def _rank_matches(record: SymmetricPairRecord, rank: int) -> bool:
    if 'n' not in record.rank_expr:
        return _evaluate(record.rank_expr, None, None) == rank
    return rank >= _minimal_rank(record)


def query(klass: Optional[str] = None, sigma_type: Optional[str] = None, multiplicity: Optional[int] = None,
          rank: Optional[int] = None) -> List[SymmetricPairRecord]:
    """
    Records matching every given filter, in table order.

    Multiplicities that depend on n only match through ``concretize``.
    """
    if klass is not None and klass not in KLASSES:
        raise InvalidSpecError('atlas', 'unknown record class', klass)
    family, sigma_rank = _parse_sigma(sigma_type) if sigma_type else (None, None)
    records, _ = load_atlas()
    selected = []
    for record in records:
        if klass is not None and record.klass != klass:
            continue
        if family is not None and record.sigma_type != family:
            continue
        if sigma_rank is not None and not _rank_matches(record, sigma_rank):
            continue
        if multiplicity is not None and record.fixed_multiplicity != multiplicity:
            continue
        if rank is not None and not _rank_matches(record, rank):
            continue
        selected.append(record)
    return selected


@dataclass(frozen=True)
class ThetaHint:
    candidates: Tuple[ThetaSet, ...]
    pinned: bool
    note: str

    def to_dict(self) -> dict:
        return {'candidates': [theta.label() for theta in self.candidates], 'pinned': self.pinned, 'note': self.note}


def theta_hint(record: SymmetricPairRecord, n: Optional[int] = None, j: Optional[int] = None) -> ThetaHint:
    """Θ = Π for Riemannian pairs, the |Π∖Θ| = 1 candidates for NCC pairs, nothing otherwise"""
    if record.klass == 'keps2':
        return ThetaHint((), False, KEPS2_NOTE)
    rank = concretize(record, n, j).rank
    if record.klass == 'riemannian':
        return ThetaHint((ThetaSet.full(rank),), True, '')
    candidates = tuple(ThetaSet(tuple(i for i in range(rank) if i != beta), rank) for beta in range(rank))
    return ThetaHint(candidates, False, NCC_NOTE)


def isomorphisms(klass: Optional[str] = None) -> List[IsomorphismRecord]:
    _, records = load_atlas()
    return [record for record in records if klass is None or record.klass == klass]


def export_atlas() -> dict:
    """The whole atlas as one JSON-ready document"""
    records, isos = load_atlas()
    return {
        'tables': [{'class': klass, 'title': KLASS_TITLES[klass],
                    'records': [record.to_dict() for record in records if record.klass == klass],
                    'isomorphisms': [iso.to_dict() for iso in isos if iso.klass == klass]}
                   for klass in KLASSES],
        'checksums': dict(CHECKSUMS),
    }
