from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kryify.ring import (Poly, complete_homogeneous, factorization_coeffs, is_symmetric, parse_poly, power_sum,
                         power_sum_jacobian, variable, xvar)

X = [xvar(i) for i in range(1, 4)]
XP = [xvar(i, 1) for i in range(1, 4)]


@st.composite
def polys(draw, names=(0, 1, 2), max_terms=4):
    out = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 3)))
        term = Poly.const(c)
        for i in names:
            term = term * X[i] ** draw(st.integers(0, 2))
        out = out + term
    return out


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == Poly()


@given(polys())
def test_parse_roundtrip(p):
    assert parse_poly(p.to_str()) == p


@given(polys(), st.integers(0, 2))
def test_diff_leibniz(p, i):
    v = variable("x", i + 1)
    q = X[i] * X[(i + 1) % 3] + 1
    assert (p * q).diff(v) == p.diff(v) * q + p * q.diff(v)


@given(st.integers(0, 6))
def test_complete_homogeneous_divided_difference(k):
    # (x - y) h_k(x, y) = x^(k+1) - y^(k+1)
    a, b = X[0], XP[0]
    assert (a - b) * complete_homogeneous(k, [a, b]) == a ** (k + 1) - b ** (k + 1)


def test_complete_homogeneous_edge_cases():
    assert complete_homogeneous(0, [X[0]]) == Poly.const(1)
    assert complete_homogeneous(-1, [X[0]]) == Poly()
    with pytest.raises(ValueError):
        complete_homogeneous(2, [])


def test_degrees():
    assert xvar(1).degree() == (0, 2, 0)
    assert Poly.var("y", 1).degree() == (0, -2, -2)
    assert Poly.var("u", 3).degree() == (0, 6, 2)
    with pytest.raises(ValueError):
        (X[0] + 1).degree()


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_power_sum_jacobian_chain_rule(n, k):
    # p_k = F(p_1..p_n) implies dp_k/dx_i = sum_l dF/dp_l * l x_i^(l-1)
    xs = X[:n]
    pk = power_sum(k, xs)
    for i in range(1, n + 1):
        lhs = pk.diff(variable("x", i))
        rhs = sum((power_sum_jacobian(k, l, n) * l * xs[i - 1] ** (l - 1) for l in range(1, n + 1)), Poly())
        assert lhs == rhs


def test_power_sum_jacobian_bounds():
    with pytest.raises(ValueError):
        power_sum_jacobian(3, 3, 2)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_factorization_coeffs(k):
    n = 3
    Q = power_sum(k, X[:n]) * power_sum(1, X[:n])
    a = factorization_coeffs(Q, n)
    sub = {variable("x", i).id: XP[i - 1] for i in range(1, n + 1)}
    total = sum((a[i] * (X[i] - XP[i]) for i in range(n)), Poly())
    assert total == Q - Q.subs(sub)


def test_factorization_requires_symmetric():
    assert not is_symmetric(X[0], 2)
    with pytest.raises(ValueError):
        factorization_coeffs(X[0], 2)


def test_integrate():
    t = variable("aux", 0)
    T = Poly.from_var(t)
    assert (T * 3).integrate(t, 0, 1) == Poly.const(Fraction(3, 2))
