from __future__ import annotations

from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewstc.algebra import skew
from skewstc.autgroup import GradedMap, close_group, identity_map, root, tau, theta
from skewstc.cyclotomic import CycScalar
from skewstc.errors import InternalConsistencyError
from skewstc.series import (TruncSeries, expand, format_product_form, hilbert_series, matches_qr_form,
                            molien_fixed_hilbert, product_form, qr_form, rational, recognize_product_form,
                            trace_series)
from skewstc.structure import make_M_group


def _brute_trace(g, d):
    # trace via the full image matrix, no monomial shortcut
    from skewstc.algebra import monomials
    A = g.ring
    acc = CycScalar.zero(A.order)
    for e in monomials(A.n, d):
        f = A.one()
        for j, k in enumerate(e):
            for _ in range(k):
                f = f * A.linear([g.matrix[i][j] for i in range(A.n)])
        acc = acc + f.coeff(e)
    return acc


def test_identity_trace(k2):
    assert trace_series(k2, identity_map(k2), 4) == (1, 2, 3, 4, 5)
    assert hilbert_series(skew(3, 1), 5) == tuple(comb(d + 2, 2) for d in range(6))


def test_small_traces(k2):
    assert trace_series(k2, theta(k2, 1, -1), 4) == (1, 0, 1, 0, 1)
    assert trace_series(k2, tau(k2, 1, 2), 4) == (1, 0, 1, 0, 1)
    A = skew(2, 1, order=4)
    # the classical rotation by 90 degrees has trace (1, 0, -1, 0, 1, ...) in even degrees
    r = GradedMap(A, [[0, -1], [1, 0]])
    assert trace_series(A, r, 4) == (1, 0, -1, 0, 1)


def test_molien_small(k2):
    G = close_group([tau(k2, 1, 2)])
    assert molien_fixed_hilbert(k2, G, 4) == (1, 0, 2, 0, 3)


def test_molien_example(ex61, k3):
    s = molien_fixed_hilbert(k3, ex61, 9)
    assert s == (1, 0, 1, 1, 2, 1, 3, 2, 4, 3)
    assert recognize_product_form(s, n=3) == [2, 3, 4]


def test_expand_and_forms():
    r = rational([1], [1, -1], 4)
    assert expand(r, 4) == (1, 1, 1, 1, 1)
    assert expand(product_form([1, 2], 4), 5) == (1, 1, 2, 2, 3, 3)
    assert format_product_form([4, 2]) == "1/((1-t^2)(1-t^4))"
    assert format_product_form([1]) == "1/(1-t)"
    assert str(qr_form(2, CycScalar.rational(4, -1))) == "1/((1-t)(1-(-1)t))"


def test_recognize_product_form():
    assert recognize_product_form(TruncSeries.of([1, 0, 2, 0, 3, 0, 4], 4)) == [2, 2]
    assert recognize_product_form(TruncSeries.of([1, 0, 3, 0, 6], 4), n=2) is None
    # 1 + t^2 is a polynomial, not a product of (1 - t^d)^{-1}
    assert recognize_product_form(TruncSeries.of([1, 0, 1, 0, 0, 0], 4)) is None
    assert recognize_product_form(TruncSeries.of([2, 1], 4)) is None


def test_qr_form_matching(k3):
    lam = CycScalar.rational(4, -1)
    assert matches_qr_form(trace_series(k3, theta(k3, 1, -1), 8), 3, lam)
    assert matches_qr_form(trace_series(k3, tau(k3, 1, 2), 8), 3, lam)
    minus = GradedMap(k3, [[-1, 0, 0], [0, -1, 0], [0, 0, -1]])
    assert not matches_qr_form(trace_series(k3, minus, 8), 3, lam)
    i = root(k3, 4)
    assert matches_qr_form(trace_series(k3, theta(k3, 2, i), 6), 3, i)


def test_molien_detects_bad_group():
    A = skew(2, 1, order=4)
    # a non-closed "group" averages to non-integers
    from skewstc.autgroup import FiniteGroup
    G = FiniteGroup(A, [identity_map(A), theta(A, 1, -1), theta(A, 2, -1)], [1, 2], [(), (0,), (1,)])
    with pytest.raises(InternalConsistencyError):
        molien_fixed_hilbert(A, G, 3)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_trace_matches_brute_force(data):
    G = make_M_group(3, 1, 4)
    g = data.draw(st.sampled_from(G.elements))
    d = data.draw(st.integers(0, 4))
    assert trace_series(G.ring, g, d)[d] == _brute_trace(g, d)


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_trace_is_a_class_function(data):
    G = make_M_group(3, 1, 2)
    g = data.draw(st.sampled_from(G.elements))
    h = data.draw(st.sampled_from(G.elements))
    assert trace_series(G.ring, h * g * h.inverse(), 6) == trace_series(G.ring, g, 6)
