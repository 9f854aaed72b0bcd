# tests/test_rootsys.py

import numpy as np
import pytest

from analysis.errors import CapExceededError, InvalidSpecError
from analysis.rootsys import (
    FAMILIES, LatticeVector, ThetaSet, a_theta_contains, a_theta_contains_bruteforce, build_root_system,
    dominant_representative, is_dominant, lambda_alpha, lattice_array, lattice_count, parabolic, weyl_group,
    weyl_group_order
)


@pytest.mark.parametrize('family,rank,n_roots', [
    ('A', 1, 2), ('A', 2, 6), ('A', 3, 12), ('B', 2, 8), ('C', 3, 18), ('D', 4, 24), ('G2', 2, 12), ('F4', 4, 48),
    ('E6', 6, 72),
])
def test_root_counts(family, rank, n_roots):
    rs = build_root_system(family, rank)
    assert len(rs.roots) == n_roots
    assert rs.n_positive == n_roots // 2
    assert rs.simple_roots.shape == (rank, rank)


def test_a1_is_normalized(a1):
    alpha = a1.simple_roots[0]
    assert alpha @ alpha == pytest.approx(1.0, abs=1e-12)
    assert a1.label == 'A1'


@pytest.mark.parametrize('family,rank', [('A', 2), ('B', 3), ('C', 2), ('D', 4), ('G2', 2), ('F4', 4)])
def test_root_system_invariants(family, rank):
    rs = build_root_system(family, rank)
    roots = rs.roots
    # closed under reflections
    for alpha in roots:
        reflected = roots - 2 * np.outer(roots @ alpha / (alpha @ alpha), alpha)
        for beta in reflected:
            assert np.min(np.abs(roots - beta).max(axis=1)) < 1e-12
    # positive roots are nonnegative integer combinations of simple roots
    assert np.all(rs.positive_coeffs >= 0)
    assert np.allclose(rs.positive_coeffs @ rs.simple_roots, rs.positive_roots)
    # reduced
    for alpha in rs.positive_roots:
        assert not rs.is_root(2 * alpha)


def test_gram_matches_simple_roots(b2):
    assert np.allclose(b2.simple_roots @ b2.simple_roots.T, b2.gram, atol=1e-12)
    assert b2.cartan.tolist() == [[2, -1], [-2, 2]]


@pytest.mark.parametrize('family,rank', [('BC', 2), ('E6', 5), ('A', 0), ('D', 2), ('X', 3)])
def test_unsupported_types_are_rejected(family, rank):
    with pytest.raises(InvalidSpecError):
        build_root_system(family, rank)


def test_families_constant_lists_exceptional_types():
    assert {'E6', 'E7', 'E8', 'F4', 'G2'} <= set(FAMILIES)


@pytest.mark.parametrize('family,rank,order', [('A', 1, 2), ('A', 2, 6), ('B', 2, 8), ('G2', 2, 12), ('A', 3, 24)])
def test_weyl_group_enumeration(family, rank, order):
    rs = build_root_system(family, rank)
    group = weyl_group(rs)
    assert len(group) == order == weyl_group_order(rs)
    assert group[0].word == ()
    assert np.array_equal(group[0].matrix, np.eye(rank, dtype=np.int64))
    assert len({w.key() for w in group}) == order
    for w in group:
        assert w.det == round(np.linalg.det(w.orthogonal))
        assert np.allclose(w.orthogonal.T @ w.orthogonal, np.eye(rank), atol=1e-10)
        moved = rs.roots @ w.orthogonal.T
        for beta in moved:
            assert np.min(np.abs(rs.roots - beta).max(axis=1)) < 1e-9


def test_weyl_group_cap():
    rs = build_root_system('A', 4)
    with pytest.raises(CapExceededError):
        weyl_group(rs, cap=100)


def test_theta_parse_and_labels():
    assert ThetaSet.parse('full', 3).indices == (0, 1, 2)
    assert ThetaSet.parse('empty', 3).is_empty
    theta = ThetaSet.parse('3,1', 3)
    assert theta.indices == (0, 2)
    assert theta.label() == '1,3'
    assert theta.complement() == (1,)
    with pytest.raises(InvalidSpecError):
        ThetaSet.parse('4', 3)
    with pytest.raises(InvalidSpecError):
        ThetaSet.parse('1,1', 3)
    with pytest.raises(InvalidSpecError):
        ThetaSet.parse('a', 2)


def test_parabolic_a2(a2):
    par = parabolic(a2, ThetaSet((0,), 2))
    assert len(par.subgroup) == 2
    assert len(par.coset_reps) == 3
    assert len(par.theta_roots) == 1
    assert len(par.complement_roots) == 2
    # every w factors uniquely as u·v
    for w in weyl_group(a2):
        u, v = par.factor(w)
        assert np.allclose(u.orthogonal @ v.orthogonal, w.orthogonal)


def test_parabolic_extremes(b2):
    full = parabolic(b2, ThetaSet.full(2))
    empty = parabolic(b2, ThetaSet.empty(2))
    assert len(full.subgroup) == 8 and len(full.coset_reps) == 1
    assert len(empty.subgroup) == 1 and len(empty.coset_reps) == 8
    assert len(full.complement_roots) == 0
    assert len(empty.theta_roots) == 0


def test_lattice_enumeration(a2):
    coeffs = lattice_array(a2, 3)
    assert len(coeffs) == lattice_count(2, 3) == 10
    assert coeffs[0].tolist() == [0, 0]
    assert coeffs[1].tolist() == [1, 0]
    assert coeffs[2].tolist() == [0, 1]
    assert np.all(np.diff(coeffs.sum(axis=1)) >= 0)
    with pytest.raises(CapExceededError):
        lattice_array(a2, 1000, cap=50)


def test_lattice_vector_rejects_negative_coefficients():
    assert LatticeVector((2, 1)).height == 3
    with pytest.raises(InvalidSpecError):
        LatticeVector((1, -1))


@pytest.mark.parametrize('family,rank', [('A', 2), ('B', 2), ('G2', 2)])
def test_a_theta_membership_matches_bruteforce(family, rank, rng):
    rs = build_root_system(family, rank)
    thetas = [ThetaSet.full(rank), ThetaSet.empty(rank), ThetaSet((0,), rank), ThetaSet((1,), rank)]
    for th in thetas:
        for H in rng.normal(size=(60, rank)):
            assert a_theta_contains(rs, th, H) == a_theta_contains_bruteforce(rs, th, H)


def test_dominant_representative(b2, rng):
    for H in rng.normal(size=(20, 2)):
        dominant = dominant_representative(b2, H)
        assert np.all(b2.simple_roots @ dominant >= -1e-12)
        assert np.linalg.norm(dominant) == pytest.approx(np.linalg.norm(H))
    assert is_dominant(b2, dominant_representative(b2, np.array([-0.3, 1.1])))


def test_lambda_alpha_is_bilinear(a2):
    alpha = a2.positive_roots[2]
    lam = np.array([0.5 + 1j, -0.25 + 0.3j])
    expected = (alpha @ lam) / (alpha @ alpha)
    assert lambda_alpha(a2, lam, alpha) == pytest.approx(expected)
