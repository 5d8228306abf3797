from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coupled_painleve.polys import parse
from coupled_painleve.series import (
    EpsSeries, EssentialSingularity, PrecisionError, binomial, binomial_coeff, series_expand,
)
from strategies import nonzero_fractions, small_fractions


def test_inverse_square_root_expansion():
    s = series_expand(parse("-2*A3*eps**2"), 6, {"A3": Fraction(3)})
    b = binomial(s, Fraction(-1, 2))
    assert b.as_dict() == {0: 1, 2: 3, 4: Fraction(27, 2), 6: Fraction(135, 2)}


def test_symbolic_binomial_coefficients():
    u = series_expand(parse("-2*A3*eps**2"), 4)
    b = binomial(u, Fraction(-1, 2))
    assert b.coeff(2).same_as(parse("A3"))
    assert b.coeff(4).same_as(parse("3*A3**2/2"))


def test_binomial_needs_positive_valuation():
    with pytest.raises(EssentialSingularity):
        binomial(EpsSeries(0, [Fraction(1)], 4), Fraction(1, 2))


def test_pole_is_visible():
    s = series_expand(parse("(1 + eps)/eps**2"), 4, {})
    assert s.min_degree == -2
    assert s.coeff(-1) == 1


def test_precision_is_tracked():
    a = EpsSeries(-2, [Fraction(1)], 3)
    b = EpsSeries(0, [Fraction(1), Fraction(1)], 3)
    assert (a * b).order == 1
    with pytest.raises(PrecisionError):
        (a * b).coeff(2)


def test_cancellation_of_leading_terms_reduces_relative_precision():
    a = series_expand(parse("1/eps + 1"), 4, {})
    b = series_expand(parse("1/eps"), 4, {})
    d = a - b
    assert d.as_dict() == {0: 1}
    assert d.order == 4


def test_binomial_coefficients():
    assert binomial_coeff(Fraction(-1, 2), 2) == Fraction(3, 8)
    assert binomial_coeff(Fraction(5), 6) == 0


def test_series_expand_rejects_free_variables_at_points():
    with pytest.raises(ValueError):
        series_expand(parse("x*eps"), 3, {"t": 1})


@given(st.lists(small_fractions, min_size=1, max_size=6), nonzero_fractions, st.integers(-2, 2))
def test_inverse_times_series_is_one(coeffs, lead, v):
    s = EpsSeries(v, [lead] + coeffs, 6)
    one = s * s.inverse()
    assert one.as_dict() == {0: 1}


@given(small_fractions, small_fractions, st.integers(1, 3))
def test_power_matches_repeated_product(a, b, n):
    s = EpsSeries(0, [Fraction(1), a, b], 6)
    p = s ** n
    q = EpsSeries(0, [Fraction(1)], 6)
    for _ in range(n):
        q = q * s
    assert (p - q).as_dict() == {}


@given(small_fractions, small_fractions)
def test_binomial_exponents_add(c1, c2):
    u = EpsSeries(1, [Fraction(1), Fraction(2)], 6)
    lhs = binomial(u, c1) * binomial(u, c2)
    assert (lhs - binomial(u, c1 + c2)).as_dict() == {}


@given(small_fractions)
def test_terminating_expansion_matches_binomial_theorem(a):
    f = parse("(x + eps)**3").substitute({"x": parse(str(a))})
    s = series_expand(f, 6, {})
    for k in range(4):
        assert s.coeff(k) == binomial_coeff(Fraction(3), k) * a ** (3 - k)


@given(nonzero_fractions, nonzero_fractions)
def test_expansion_of_a_quotient_evaluates_correctly(a, b):
    s = series_expand(parse("1/(x - eps*y)"), 8, {"x": a, "y": b})
    eps = Fraction(1, 10**6)
    approx = sum(s.coeff(k) * eps**k for k in range(9))
    assert abs(approx - 1 / (a - eps * b)) < abs(1 / a) * Fraction(1, 10**40) * (1 + abs(b / a)) ** 9
