import random
from fractions import Fraction

import pytest

from coupled_painleve.polys import parse
from coupled_painleve.sampling import (
    BOUND, Indeterminate, check_rng, derive_seed, identical, random_rational, with_resampling,
)


def test_seed_derivation_is_stable_and_check_specific():
    assert derive_seed(0, "a") == derive_seed(0, "a")
    assert derive_seed(0, "a") != derive_seed(0, "b")
    assert derive_seed(1, "a") != derive_seed(0, "a")


def test_random_rationals_stay_in_bounds():
    rng = check_rng(0, "bounds")
    for _ in range(200):
        q = random_rational(rng)
        assert abs(q.numerator) <= BOUND and q.denominator <= BOUND


def test_identity_testing_distinguishes():
    rng = random.Random(0)
    assert identical(parse("(x+y)**2"), parse("x**2 + 2*x*y + y**2"), rng)
    assert not identical(parse("(x+y)**2"), parse("x**2 + y**2"), rng)


def test_exhausted_resampling_is_indeterminate():
    def always_unlucky(_):
        raise ZeroDivisionError

    with pytest.raises(Indeterminate):
        with_resampling(random.Random(0), lambda r: {"x": Fraction(0)}, always_unlucky, 1)
