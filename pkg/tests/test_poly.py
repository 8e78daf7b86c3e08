from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homoshift.poly import (
    HomoPoly,
    PolynomialError,
    UniPoly,
    dehomogenize,
    divide_exact,
    eval_float,
    eval_poly,
    euler_residual,
    gcd_homo,
    homogenize,
    is_unit,
    partial_x,
    partial_y,
    squarefree_decomposition,
    to_string,
    uni_gcd,
)
from homoshift.expr import parse_poly

from conftest import homo_polys, rationals


def test_parse_examples():
    g = parse_poly("x^2 - y^2")
    assert g.degree == 2 and g.coeffs == (Fraction(-1), 0, Fraction(1))
    h = parse_poly("2*x*y")
    assert [h.coeff(i) for i in range(3)] == [0, 2, 0]
    with pytest.raises(PolynomialError, match="non-homogeneous"):
        parse_poly("x^2 + x")


def test_partials():
    g = parse_poly("x^2 - y^2")
    assert partial_x(g) == parse_poly("2*x")
    assert partial_y(g) == parse_poly("-2*y")
    assert partial_x(HomoPoly([7], 0)).is_zero


@pytest.mark.parametrize("text,x,y,want", [("x^2-y^2", 3, 5, -16), ("2*x*y", 1, 1, 2), ("x^3", 2, 7, 8)])
def test_eval(text, x, y, want):
    g = parse_poly(text)
    assert eval_poly(g, Fraction(x), Fraction(y)) == want
    assert eval_float(g.float_coeffs(), float(x), float(y)) == pytest.approx(want)


def test_dehomogenize_examples():
    assert dehomogenize(parse_poly("x^2*y")) == (1, UniPoly([0, 0, 1]))
    assert dehomogenize(parse_poly("x^2+y^2")) == (0, UniPoly([1, 0, 1]))
    assert dehomogenize(parse_poly("y^3")) == (3, UniPoly([1]))
    with pytest.raises(PolynomialError):
        dehomogenize(HomoPoly.zero())


def test_gcd_examples():
    assert is_unit(gcd_homo(parse_poly("2*x"), parse_poly("-2*y")))
    assert gcd_homo(parse_poly("x^2*y"), parse_poly("x*y^2")) == parse_poly("x*y")
    g = parse_poly("3*x^2*y - y^3")
    assert divide_exact(g, gcd_homo(g, g)) is not None
    assert gcd_homo(g, g).degree == 3


@pytest.mark.parametrize("text,x,y", [("x^2-y^2", 3, 5), ("2*x*y", 7, -2), ("3*x^2*y-y^3", 1, 1)])
def test_euler_examples(text, x, y):
    assert euler_residual(parse_poly(text), Fraction(x), Fraction(y)) == 0


def test_zero_marker():
    z = HomoPoly([0, 0, 0])
    assert z.is_zero and z.degree is None
    assert to_string(z) == "0"


def test_unipoly_arithmetic():
    a = UniPoly([-2, 0, 1])
    b = UniPoly([1, 1])
    q, r = a.divmod(b)
    assert q * b + r == a
    assert uni_gcd(UniPoly([0, 0, 1]), UniPoly([0, 2])) == UniPoly([0, 1])
    sq = squarefree_decomposition(UniPoly([0, 0, 1]) * UniPoly([1, 1]))
    assert sorted((f.degree, m) for f, m in sq) == [(1, 1), (1, 2)]


@given(homo_polys(2, 8, 9), rationals, rationals)
def test_euler_identity_exact(g, x, y):
    assert euler_residual(g, x, y) == 0


@given(homo_polys(1, 7, 9))
def test_print_parse_round_trip(g):
    assert parse_poly(to_string(g)) == g


@given(homo_polys(1, 7, 9))
def test_dehomogenize_round_trip(g):
    m, u = dehomogenize(g)
    back = homogenize(u, g.degree - m) * HomoPoly.monomial(0, m)
    assert back == g


@given(homo_polys(1, 5, 5), homo_polys(1, 5, 5))
def test_gcd_divides_both(g, h):
    c = gcd_homo(g, h)
    assert divide_exact(g, c) is not None
    assert divide_exact(h, c) is not None


@given(homo_polys(2, 7, 9))
def test_partials_commute(g):
    assert partial_x(partial_y(g)) == partial_y(partial_x(g))


@given(homo_polys(1, 4, 5), homo_polys(1, 4, 5))
def test_product_evaluates_multiplicatively(g, h):
    x, y = Fraction(3, 7), Fraction(-5, 2)
    assert (g * h)(x, y) == g(x, y) * h(x, y)


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6).filter(any))
def test_squarefree_factors_reassemble(coeffs):
    u = UniPoly(coeffs)
    prod = UniPoly([1])
    for f, m in squarefree_decomposition(u):
        for _ in range(m):
            prod = prod * f
    assert prod.monic() == u.monic()
