from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewstc.algebra import skew
from skewstc.autgroup import (GradedMap, apply, classical_family, close_group, compare_order_distributions,
                              element_order, find_dicyclic_pair, identity_map, is_graded_automorphism,
                              monomial_cycle_order, order_distribution, root, s_map, tau, theta)
from skewstc.cyclotomic import embed_root
from skewstc.errors import GroupTooLargeError, NotAutomorphismError
from skewstc.structure import make_M_group

from conftest import dicyclic_example


# -- an independent oracle: signed permutation matrices as integer tuples ------------


def _imul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _int_closure(gens):
    n = len(gens[0])
    e = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    seen, todo = {e}, [e]
    while todo:
        cur = todo.pop()
        for g in gens:
            h = _imul(cur, g)
            if h not in seen:
                seen.add(h)
                todo.append(h)
    return seen


def _int_order(g):
    n = len(g)
    e = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    h, k = g, 1
    while h != e:
        h, k = _imul(h, g), k + 1
    return k


def _int_distribution(group):
    out = {}
    for g in group:
        k = _int_order(g)
        out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items()))


def _int_tau(n, s, t):
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    m[s][s] = m[t][t] = 0
    m[t][s], m[s][t] = 1, -1
    return tuple(map(tuple, m))


def _signed_perms_even(n):
    out = set()
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            if signs.count(-1) % 2 == 0:
                m = [[0] * n for _ in range(n)]
                for j, i in enumerate(perm):
                    m[i][j] = signs[j]
                out.add(tuple(map(tuple, m)))
    return out


@pytest.fixture(scope="module")
def oracle_distributions():
    out = {}
    for n in (3, 4):
        out["M", n] = _int_distribution(_int_closure([_int_tau(n, i, i + 1) for i in range(n - 1)]))
        out["G", n] = _int_distribution(_signed_perms_even(n))
    return out


def test_oracle_values_match(oracle_distributions):
    assert oracle_distributions["M", 4] == {1: 1, 2: 43, 3: 32, 4: 36, 6: 32, 8: 48}
    assert oracle_distributions["G", 4] == {1: 1, 2: 43, 3: 32, 4: 84, 6: 32}
    assert oracle_distributions["M", 3] == oracle_distributions["G", 3] == {1: 1, 2: 9, 3: 8, 4: 6}


@pytest.mark.parametrize("n", [3, 4])
def test_order_distributions_against_oracle(n, oracle_distributions):
    M = make_M_group(n, 1, 2)
    A = skew(n, 1, order=4)
    G = close_group(classical_family(A, 2, 2), ring=A)
    assert len(M) == len(G) == 2 ** (n - 1) * [1, 1, 2, 6, 24][n]
    assert order_distribution(M) == oracle_distributions["M", n]
    assert order_distribution(G) == oracle_distributions["G", n]


def test_compare_orders_report():
    cmp = compare_order_distributions(make_M_group(4, 1, 2), close_group(classical_family(skew(4, 1), 2, 2)))
    assert cmp["orders"] == [192, 192]
    assert cmp["differing_orders"] == [4, 8]
    assert cmp["first_differing_order"] == 8
    cmp3 = compare_order_distributions(make_M_group(3, 1, 2), close_group(classical_family(skew(3, 1), 2, 2)))
    assert cmp3["same_distribution"] and cmp3["first_differing_order"] is None


def test_automorphism_checks(k2):
    t = tau(k2, 1, 2)
    assert is_graded_automorphism(t, k2)
    assert t.matrix[1][0] == 1 and t.matrix[0][1] == -1  # x1 -> x2, x2 -> -x1
    assert is_graded_automorphism(identity_map(k2), k2)
    Aq = skew(2, embed_root(3, 1), order=3)
    with pytest.raises(NotAutomorphismError, match="generator is not a graded automorphism"):
        GradedMap(Aq, [[0, 1], [1, 0]])
    with pytest.raises(NotAutomorphismError, match="singular"):
        GradedMap(k2, [[1, 1], [1, 1]])


def test_constructors(k3):
    g2 = tau(k3, 2, 3)
    assert [[str(c) for c in r] for r in g2.matrix] == [["1", "0", "0"], ["0", "0", "-1"], ["0", "1", "0"]]
    th = theta(k3, 1, -1)
    assert [str(th.matrix[i][i]) for i in range(3)] == ["-1", "1", "1"]
    with pytest.raises(ValueError):
        tau(skew(3, {(1, 2): -1, (1, 3): -1, (2, 3): 1}), 1, 2)  # p_13 != p_23
    with pytest.raises(ValueError):
        tau(skew(2, 1), 1, 2)  # p_12 != -1
    with pytest.raises(ValueError):
        s_map(skew(2, 1), 1, 1, 1)
    with pytest.raises(ValueError):
        classical_family(skew(3, 1), 3, 2)


def test_apply(k2):
    x1, x2 = k2.gens()
    t = tau(k2, 1, 2)
    assert apply(t, x1 * x2) == x1 * x2
    lam = root(k2, 4)
    assert apply(theta(k2, 1, lam), x1 ** 2) == (x1 ** 2).scale(lam * lam)
    assert apply(identity_map(k2), x1 * x2 + x2) == x1 * x2 + x2


def test_closure_examples(k3, ex61):
    assert len(ex61) == 24
    assert ex61.is_abelian() is False
    assert len(close_group([identity_map(k3)])) == 1
    assert len(close_group(classical_family(skew(3, 1), 2, 2))) == 24
    for m in (1, 2, 3):
        _, G = dicyclic_example(m)
        assert len(G) == 4 * m
    with pytest.raises(GroupTooLargeError, match="group order exceeds cap"):
        close_group([tau(k3, 1, 2), tau(k3, 2, 3)], cap=10)


def test_words_reproduce_elements(ex61):
    gens = ex61.generator_maps()
    for g, w in zip(ex61.elements, ex61.words):
        h = identity_map(ex61.ring)
        for k in w:
            h = h * gens[k]
        assert h == g


def test_orders():
    A = skew(4, -1, order=4)
    # a 4-cycle with exactly one sign flip has order 8
    g = GradedMap(A, [[0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    assert monomial_cycle_order(g) == element_order(g) == 8
    assert element_order(tau(A, 1, 2)) == 4


def test_monomial_cycle_order_matches():
    G = make_M_group(4, 1, 2)
    for g in G.elements:
        md = g.monomial_data()
        sigma = md[0]
        moved = [j for j in range(4) if sigma[j] != j]
        # single cycle through all moved indices, no fixed index carrying a sign
        if moved and all(md[1][j] == 1 for j in range(4) if sigma[j] == j):
            j, cyc = moved[0], 1
            while sigma[j] != moved[0]:
                j, cyc = sigma[j], cyc + 1
            if cyc == len(moved):
                assert monomial_cycle_order(g) == element_order(g)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_dicyclic_pair(m):
    _, G = dicyclic_example(m)
    a, b = find_dicyclic_pair(G, m)
    e = identity_map(G.ring)
    assert a ** (2 * m) == e and b.inverse() * a * b == a.inverse() and b * b == a ** m


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_apply_is_multiplicative(data):
    G = make_M_group(3, 1, 4)
    A = G.ring
    g = data.draw(st.sampled_from(G.elements))
    h = data.draw(st.sampled_from(G.elements))
    x = A.gens()
    f = x[data.draw(st.integers(0, 2))] * x[data.draw(st.integers(0, 2))] + x[data.draw(st.integers(0, 2))] ** 2
    k = x[data.draw(st.integers(0, 2))]
    assert apply(g * h, f) == apply(g, apply(h, f))
    assert apply(g, f * k) == apply(g, f) * apply(g, k)


def test_inverses_in_group():
    G = make_M_group(3, 1, 2)
    e = identity_map(G.ring)
    for g in G.elements:
        assert g * g.inverse() == e
        assert g.inverse() in G
