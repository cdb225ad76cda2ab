from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewstc.algebra import is_normal_deg1, skew
from skewstc.autgroup import GradedMap, apply, close_group, identity_map, root, tau, theta
from skewstc.cyclotomic import CycScalar, embed_root
from skewstc.errors import NotAutomorphismError
from skewstc.structure import (block_circle_decomposition, block_decomposition, circle_parameters,
                               classify_group, classify_quasi_reflection, decide_stc, eigenvalues,
                               is_p_partition, make_M_group, twist_check)

from conftest import dicyclic_example


def test_block_decomposition():
    assert block_decomposition(skew(3, 1)) == [(1, 2, 3)]
    assert block_decomposition(skew(3, -1)) == [(1,), (2,), (3,)]
    A = skew(4, {(1, 2): 1, (1, 3): -1, (1, 4): -1, (2, 3): -1, (2, 4): -1, (3, 4): 1})
    assert block_decomposition(A) == [(1, 2), (3, 4)]


def test_p_partition():
    A = skew(3, {(1, 2): -1, (1, 3): 1, (2, 3): 1})
    assert is_p_partition(A, [[1, 2], [3]])
    B = skew(3, {(1, 2): -1, (1, 3): 1, (2, 3): -1})
    assert not is_p_partition(B, [[1, 2], [3]])


def test_classify_examples(k3):
    c = classify_quasi_reflection(k3, theta(k3, 1, -1))
    assert c.variant == "Reflection" and c.lam == -1 and c.order == 2
    c = classify_quasi_reflection(k3, tau(k3, 1, 2))
    assert c.variant == "Mystic" and c.pair == (1, 2) and c.order == 4
    y1, y2 = c.anticommuting
    assert y2 * y1 == -(y1 * y2)
    minus = GradedMap(k3, [[-1, 0, 0], [0, -1, 0], [0, 0, -1]])
    c = classify_quasi_reflection(k3, minus)
    assert c.variant == "NotQR" and c.eigenvalues == {CycScalar.rational(4, -1): 3}
    assert classify_quasi_reflection(k3, identity_map(k3)).variant == "NotQR"


def test_classify_twisted_tau(k3):
    i = root(k3, 4)
    c = classify_quasi_reflection(k3, tau(k3, 1, 2, i))
    assert c.variant == "Mystic" and c.pair_lambda == i


def test_eigenvalues_outside_field():
    A = skew(3, 1, order=4)
    # a 3-cycle has eigenvalues zeta_3^k, none of which (besides 1) live in Q(zeta_4)
    g = GradedMap(A, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert eigenvalues(g, strict=False) is None
    assert classify_quasi_reflection(A, g).variant == "NotQR"


def test_example_group(k3, ex61):
    classes = classify_group(k3, ex61)
    assert sum(c.variant == "Mystic" for c in classes) == 6
    assert sum(c.variant == "Reflection" for c in classes) == 0
    rep = decide_stc(k3, ex61)
    assert rep.generated_by_qr and rep.structure == "M(3,1,2)"
    assert rep.decomposition.to_json()["parts"] == [
        {"indices": [1, 2, 3], "kind": "circle", "group_order": 24, "alpha": 1, "beta": 2}]


def test_minus_identity_not_generated(k2):
    G = close_group([GradedMap(k2, [[-1, 0], [0, -1]])])
    rep = decide_stc(k2, G)
    assert not rep.generated_by_qr and rep.qr_subgroup_order == 1
    assert "not generated by quasi-reflections" in rep.structure


def test_mixed_decomposition():
    A = skew(4, {(1, 2): -1, (1, 3): 1, (1, 4): 1, (2, 3): 1, (2, 4): 1, (3, 4): -1}, order=4)
    G = close_group([tau(A, 1, 2), theta(A, 3, -1)])
    rep = decide_stc(A, G)
    assert rep.structure == "M(2,1,2) x G[3] (order 2, classical)"
    assert (rep.n_reflections, rep.n_mystic) == (1, 2)
    parts = block_circle_decomposition(A, G).partition()
    assert sorted(parts) == [(1, 2), (3,), (4,)]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_dicyclic_circle_parameters(m):
    A, G = dicyclic_example(m)
    assert circle_parameters(A, G, [1, 2]) == (1, 2 * m)
    assert decide_stc(A, G).structure == f"M(2,1,{2 * m})"


def test_circle_parameters_with_theta():
    G = make_M_group(2, 2, 2)
    assert len(G) == 8
    assert circle_parameters(G.ring, G, [1, 2]) == (2, 2)


@pytest.mark.parametrize("n,order", [(2, 4), (3, 24), (4, 192)])
def test_M_group_orders(n, order):
    assert len(make_M_group(n, 1, 2)) == order


def test_M_group_validation():
    with pytest.raises(ValueError):
        make_M_group(3, 2, 3)
    with pytest.raises(ValueError):
        make_M_group(1, 1, 2)


def test_generic_p_forces_diagonal():
    p = embed_root(5, 1)
    A = skew(2, {(1, 2): p}, order=20)
    # a graded automorphism swapping x1, x2 needs p^2 = 1, so only diagonal maps exist
    with pytest.raises(NotAutomorphismError):
        GradedMap(A, [[0, 1], [1, 0]])
    G = close_group([theta(A, 1, root(A, 4)), theta(A, 2, -1)])
    assert all(g.monomial_data() is not None for g in G.elements)
    assert decide_stc(A, G).generated_by_qr


def test_twist_check(k3, ex61):
    rep = twist_check(k3, ex61)
    assert rep["ok"] and rep["singletons"]["pairs_checked"] == 9
    p = embed_root(3, 1)
    A = skew(3, {(1, 2): p, (1, 3): p * p, (2, 3): -1}, order=24)
    rep = twist_check(A)
    assert rep["singletons"]["ok"] and rep["partition"]["ok"]
    with pytest.raises(ValueError):
        from skewstc.algebra import quantum_matrix
        twist_check(quantum_matrix(p, order=12))


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_classification_is_conjugation_invariant(data):
    G = make_M_group(3, 1, 4)
    g = data.draw(st.sampled_from(G.elements))
    h = data.draw(st.sampled_from(G.elements))
    a = classify_quasi_reflection(G.ring, g, 8)
    b = classify_quasi_reflection(G.ring, h * g * h.inverse(), 8)
    assert (a.variant, a.order, a.det) == (b.variant, b.order, b.det)


def test_reflections_in_theta_circle():
    # M(2,2,2) contains theta_{i,-1}; each reflection has det = lambda and a normal eigenvector
    G = make_M_group(2, 2, 2)
    A = G.ring
    seen = 0
    for g in G.elements:
        c = classify_quasi_reflection(A, g)
        if c.variant == "Reflection":
            seen += 1
            assert c.det == c.lam == -1
            assert is_normal_deg1(c.eigenvector) and apply(g, c.eigenvector) == -c.eigenvector
    assert seen == 2
