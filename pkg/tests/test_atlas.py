# tests/test_atlas.py

import hashlib
import os

import pytest

from analysis.errors import InvalidSpecError
from atlas.service import concretize, concretize_label, export_atlas, isomorphisms, query, theta_hint
from atlas.tables import CHECKSUMS, DATA_DIR, EXPECTED_COUNTS, KLASSES, load_atlas


def test_embedded_files_match_checksums():
    for name, digest in CHECKSUMS.items():
        with open(os.path.join(DATA_DIR, name), 'rb') as handle:
            assert hashlib.sha256(handle.read()).hexdigest() == digest


@pytest.mark.parametrize('klass', KLASSES)
def test_table_sizes(klass):
    assert len(query(klass)) == EXPECTED_COUNTS[klass]


def test_all_multiplicities_are_even():
    records, _ = load_atlas()
    for record in records:
        pair = concretize(record)
        assert pair.multiplicity % 2 == 0, record.label


def test_query_by_multiplicity():
    rows = query('ncc', multiplicity=8)
    assert len(rows) == 1
    assert rows[0].label == 'e6(-26)/f4(-20)'
    assert {row.klass for row in query(multiplicity=4)} == {'riemannian', 'ncc'}
    # n-dependent multiplicities only match after concretizing
    assert query(multiplicity=6) == []


def test_query_by_root_system():
    assert [row.g_label for row in query('riemannian', sigma_type='E')] == ['e6(C)', 'e7(C)', 'e8(C)']
    assert [row.g_label for row in query('riemannian', sigma_type='E7')] == ['e7(C)']
    assert len(query('ncc', sigma_type='A', rank=1)) == 3
    with pytest.raises(InvalidSpecError):
        query('hermitian')
    with pytest.raises(InvalidSpecError):
        query(sigma_type='X2')


def test_concretize_family_with_two_parameters():
    record = query('ncc', sigma_type='A')[0]
    pair = concretize(record, n=5, j=2)
    assert pair.g_label == 'sl(5,C)'
    assert pair.h_label == 'su(3,2)'
    assert pair.fixed_algebra_label == 'sl(3,C)×sl(2,C)×C'
    assert (pair.family, pair.rank, pair.multiplicity) == ('A', 4, 2)
    assert pair.root_system().label == 'A4'
    with pytest.raises(InvalidSpecError):
        concretize(record, n=5, j=3)
    with pytest.raises(InvalidSpecError):
        concretize(record, n=1)


def test_concretize_defaults_and_fixed_rows():
    hyperbolic = next(row for row in query('riemannian') if row.g_label == 'so(2n+1,1)')
    pair = concretize(hyperbolic)
    assert pair.n == 3
    assert pair.g_label == 'so(7,1)'
    assert pair.multiplicity == 6
    exceptional = concretize(query('ncc', multiplicity=8)[0])
    assert exceptional.g_label == 'e6(-26)'
    assert (exceptional.family, exceptional.rank) == ('A', 2)
    assert exceptional.to_dict()['sigma'] == 'A2'


def test_concretize_label_nested_arguments():
    assert concretize_label('su*(2(n-j))×su*(2j)×R', 5, 2) == 'su*(6)×su*(4)×R'
    with pytest.raises(InvalidSpecError):
        concretize_label('su(n-j,j)', 3, None)


def test_theta_hints():
    riemannian = theta_hint(query('riemannian', sigma_type='G')[0])
    assert riemannian.pinned
    assert [theta.label() for theta in riemannian.candidates] == ['full']
    ncc = theta_hint(query('ncc', multiplicity=8)[0])
    assert not ncc.pinned
    assert sorted(theta.label() for theta in ncc.candidates) == ['1', '2']
    other = theta_hint(query('keps2')[0])
    assert other.candidates == () and other.note


def test_isomorphisms_and_export():
    assert len(isomorphisms()) == 13
    assert len(isomorphisms('ncc')) == 7
    document = export_atlas()
    assert [table['class'] for table in document['tables']] == list(KLASSES)
    assert sum(len(table['records']) for table in document['tables']) == sum(EXPECTED_COUNTS.values())
    assert document['checksums'] == CHECKSUMS
