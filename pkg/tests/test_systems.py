import random
from fractions import Fraction

import pytest

from coupled_painleve.polys import RatFunc, parse
from coupled_painleve.sampling import identical
from coupled_painleve.systems import (
    SYSTEM_NAMES, InvariantDivisor, build_HIII, build_HV, build_system, check_invariant_divisor,
    export_text, lie_derivative, phase_degree, vector_field, weighted_degree,
)


def test_hv_with_zero_parameters():
    assert build_HV("x", "y", "t", 0, 0, 0).same_as(parse("x*(x-1)*y*(y+t)/t"))


def test_hv_value():
    H = build_HV("x", "y", "t", 1, 0, 0)
    assert H.evaluate({"x": 2, "y": 3, "t": 1}) == 21


def test_hiii_value():
    assert build_HIII("x", "y", "t", 1, 0).evaluate({"x": 1, "y": 2, "t": 1}) == 6
    assert build_HIII("x", "y", "t", 0, 0).same_as(parse("(x**2*y*(y-1) + t*y)/t"))


def test_d5_splits_into_two_hv_and_a_coupling():
    s = build_system("D5")
    rest = (s.hamiltonian - build_HV("x", "y", "t", "a2+a5", "a1", "a2+2*a3+a4")
            - build_HV("z", "w", "t", "a5", "a3", "a4"))
    assert rest.same_as(parse("2*y*z*((z-1)*w + a3)/t"))


def test_b4_splits_into_two_hiii_and_a_coupling():
    s = build_system("B4")
    rest = (s.hamiltonian - build_HIII("x", "y", "t", "a0", "a1")
            - build_HIII("z", "w", "t", "a0+a1+2*a2+a3", "a3"))
    assert rest.same_as(parse("2*y*z*(z*w + a3)/t"))


@pytest.mark.parametrize("name", SYSTEM_NAMES)
def test_derived_field_matches_printed(name):
    s = build_system(name)
    rng = random.Random(name)
    for f, g in zip(vector_field(s), s.printed_rhs):
        assert identical(f, g, rng, 25)


def test_printed_field_is_not_vacuous():
    # a deliberately perturbed transcription must be caught
    s = build_system("D5")
    assert not identical(vector_field(s)[0], s.printed_rhs[0] + parse("z/t"), random.Random(0), 5)


def test_constraints():
    assert build_system("D5").params.describe() == "1*a0 + 1*a1 + 2*a2 + 2*a3 + 1*a4 + 1*a5 = 1"
    d4 = build_system("D4_2").params
    assert d4.on_plane({"b1": Fraction(1, 8), "b2": Fraction(1, 8), "b3": Fraction(1, 8), "b4": Fraction(1, 8)})


def test_a4_printed_second_component():
    assert build_system("A4").printed_rhs[1].same_as(parse("-2*Y**2 + 2*X*Y + 2*T*Y + A1"))


def test_unknown_system():
    with pytest.raises(KeyError):
        build_system("E8")


@pytest.mark.parametrize("name", ["D5", "B4", "D4_2"])
def test_every_divisor_row(name):
    s = build_system(name)
    assert s.divisors
    for d in s.divisors:
        assert check_invariant_divisor(s, d), d


def test_divisor_condition_violated():
    s = build_system("B4")
    assert not check_invariant_divisor(s, InvariantDivisor(parse("y"), "a1", Fraction(1)))


def test_divisor_needs_its_parameter():
    s = build_system("D5")
    assert not check_invariant_divisor(s, InvariantDivisor(parse("y"), "a0"))


def test_lie_derivative_includes_explicit_time():
    s = build_system("D5")
    assert lie_derivative(s, RatFunc.var("t")).same_as(RatFunc.const(1))


def test_degrees():
    for name in ("D5", "B4", "D4_2"):
        s = build_system(name)
        assert phase_degree(s) <= 6
        assert weighted_degree(s) == 6
    assert phase_degree(build_system("A4")) == 3


def test_export_is_deterministic():
    a = export_text(build_system("B3"))
    assert a == export_text(build_system("B3"))
    assert a.startswith("system B3\n")
