from __future__ import annotations

import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewstc.algebra import (NCPoly, general, is_normal_deg1, make_presentation, make_twist, monomials,
                             normal_deg1_space, normal_order, pbw_dimension, q_commutator, quantum_matrix, skew,
                             standard_twist, twisted_multiply)
from skewstc.cyclotomic import CycScalar, embed_root, lift
from skewstc.errors import SpecError


def test_skew_relations(k2):
    x1, x2 = k2.gens()
    assert x2 * x1 == -(x1 * x2)
    assert normal_order(k2, [2, 1]) == -(x1 * x2)
    assert normal_order(k2, [1, 2]) == x1 * x2
    assert (x1 + x2) ** 2 == x1 ** 2 + x2 ** 2
    assert (x1 * x2) * (x1 * x2) == -(x1 ** 2 * x2 ** 2)
    assert x1 * k2.one() == x1


def test_commutative_ring():
    A = skew(3, 1)
    x1, x2, x3 = A.gens()
    assert x3 * x1 == x1 * x3 and x3 * x2 * x1 == x1 * x2 * x3


def test_quantum_matrix_relations():
    q = embed_root(3, 1)
    A = quantum_matrix(q, order=12)
    x11, x12, x21, x22 = A.gens()
    qq = lift(q, 12)
    assert x22 * x11 == x11 * x22 + (x12 * x21).scale(qq.inverse() - qq)
    assert x12 * x11 == (x11 * x12).scale(qq)
    assert x21 * x11 == (x11 * x21).scale(qq)
    assert x22 * x12 == (x12 * x22).scale(qq)
    assert x22 * x21 == (x21 * x22).scale(qq)
    assert x21 * x12 == x12 * x21
    assert A.overlap_defects() == []


def test_zero_parameter_rejected():
    with pytest.raises(SpecError, match="parameter must be nonzero"):
        skew(2, {(1, 2): 0})
    with pytest.raises(SpecError):
        quantum_matrix(0)


def test_non_pbw_relations_rejected():
    # x2 x1 = x1 x2 + x1^2, x3 x1 = -x1 x3, x3 x2 = x2 x3: the two reductions of
    # x3 x2 x1 differ by 2 x1^2 x3
    with pytest.raises(SpecError, match="not a PBW presentation"):
        general(3, [(2, 1, 1, {(1, 1): 1}), (3, 1, -1, {})])


def test_jordan_plane_is_pbw():
    J = general(2, [(2, 1, 1, {(1, 1): 1})])
    x1, x2 = J.gens()
    # x2 x1 = x1 x2 + x1^2, hence x2 x1^2 = x1^2 x2 + 2 x1^3
    assert x2 * x1 * x1 == x1 * x1 * x2 + (x1 ** 3).scale(2)


def test_make_presentation_round_trip():
    for A in (skew(3, {(1, 2): -1, (2, 3): embed_root(4, 1)}), quantum_matrix(embed_root(4, 1), 4),
              general(2, [(2, 1, 1, {(1, 1): 1})])):
        assert make_presentation(A.to_spec(), A.order) == A


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pbw_dimension(n):
    for d in range(9):
        assert len(monomials(n, d)) == pbw_dimension(n, d) == comb(n + d - 1, d)


def test_normality():
    A = quantum_matrix(embed_root(3, 1), order=12)
    space = normal_deg1_space(A)
    assert [[str(f) for f in part] for part in space] == [["x12", "x21"]]
    p = embed_root(3, 1)
    B = skew(3, {(1, 2): p, (1, 3): 1, (2, 3): p}, order=3)
    x1, x2, x3 = B.gens()
    assert not is_normal_deg1(x1 + x3)  # p_12 = p but p_32 = 1/p
    assert is_normal_deg1(x1)
    C = skew(3, {(1, 2): p, (1, 3): 1, (2, 3): p * p}, order=3)
    y1, y2, y3 = C.gens()
    assert is_normal_deg1(y1 + y3)  # p_12 = p_32 makes {1,3} a block


def test_q_commutator():
    p = embed_root(4, 1)
    A = skew(2, {(1, 2): p}, order=4)
    x1, x2 = A.gens()
    assert q_commutator(x1, x2) == p.inverse()
    B = quantum_matrix(embed_root(3, 1), order=12)
    x11, _, _, x22 = B.gens()
    assert q_commutator(x11, x22) is None


def test_normal_space_all_generic():
    p = embed_root(5, 1)
    A = skew(3, {(1, 2): p, (1, 3): p ** 2, (2, 3): p ** 3}, order=5)
    assert [[str(f) for f in part] for part in normal_deg1_space(A)] == [["x1"], ["x2"], ["x3"]]


def test_twists_on_quantum_plane():
    p = embed_root(3, 1)
    A = skew(2, {(1, 2): p}, order=12)
    x1, x2 = A.gens()
    tw = standard_twist(A, [[1], [2]])
    q12 = tw.diagonals[0][1]
    assert q12 * q12 == lift(p, 12)
    assert twisted_multiply(x1, x2, tw) == (x1 * x2).scale(q12)
    assert twisted_multiply(x2, x1, tw) == (x1 * x2).scale(q12)
    ident = make_twist(A, [[1, 2]], [[1, 1]])
    assert twisted_multiply(x2, x1, ident) == x2 * x1


def test_twist_keeps_circle_relation(k2):
    x1, x2 = k2.gens()
    tw = standard_twist(k2, [[1, 2]])
    assert twisted_multiply(x1, x2, tw) != twisted_multiply(x2, x1, tw)
    assert twisted_multiply(x2, x1, tw) == -(x1 * x2)


def test_twist_needs_p_partition():
    A = skew(3, {(1, 2): -1, (1, 3): 1, (2, 3): embed_root(4, 1)}, order=8)
    with pytest.raises(ValueError, match="p-partition"):
        standard_twist(A, [[1, 2], [3]])


def test_twist_maps_must_be_diagonal(k2):
    with pytest.raises(ValueError):
        make_twist(k2, [[1], [2]], [[[0, 1], [1, 0]], [1, 1]])


def test_json_round_trip(k3):
    x1, x2, x3 = k3.gens()
    f = x1 * x2 + (x3 ** 2).scale(embed_root(4, 1)) - 3
    assert NCPoly.from_json(k3, f.to_json()) == f


# -- properties -----------------------------------------------------------------


def _rings():
    z = embed_root(12, 1)
    return [
        skew(3, -1, order=12),
        skew(3, {(1, 2): z, (1, 3): z ** 4, (2, 3): -1}, order=12),
        quantum_matrix(z ** 4, order=12),
        general(2, [(2, 1, 1, {(1, 1): 1})], order=12),
    ]


RINGS = _rings()


@st.composite
def homogeneous(draw, A, d):
    monos = monomials(A.n, d)
    picks = draw(st.lists(st.sampled_from(monos), min_size=1, max_size=3))
    terms = {}
    for e in picks:
        terms[e] = CycScalar.rational(A.order, draw(st.integers(-3, 3)))
    return NCPoly(A, {e: c for e, c in terms.items() if c})


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_multiplication_is_associative(data):
    A = data.draw(st.sampled_from(RINGS))
    f, g, h = (data.draw(homogeneous(A, data.draw(st.integers(0, 2)))) for _ in range(3))
    assert (f * g) * h == f * (g * h)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_degrees_add(data):
    A = data.draw(st.sampled_from(RINGS))
    d, e = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))
    f, g = data.draw(homogeneous(A, d)), data.draw(homogeneous(A, e))
    prod = f * g
    assert prod.is_zero() or prod.degree == d + e


@pytest.mark.parametrize("A", RINGS, ids=lambda A: A.kind)
def test_overlaps_resolve(A):
    # the two ways of reducing x_k x_j x_i agree
    for k, j, i in itertools.combinations(range(A.n, 0, -1), 3):
        left = normal_order(A, [k, j]) * A.gen(i)
        right = A.gen(k) * normal_order(A, [j, i])
        assert left == right == normal_order(A, [k, j, i])
