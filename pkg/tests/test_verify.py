import random
from dataclasses import replace
from fractions import Fraction

import pytest

from coupled_painleve.polys import parse
from coupled_painleve.sampling import Indeterminate
from coupled_painleve.systems import SYSTEM_NAMES, build_system
from coupled_painleve.verify import (
    SCHEME_NAMES, Binomial, Chart, NotBirational, SubgroupEntry, _chart, chart_atlas, chart_field_at,
    check_birational, check_chart, check_constraint_transport, check_degeneration, check_inverse,
    check_subgroup_entry, check_symmetry, check_symplectic, conjugated_action, degeneration_report,
    degeneration_scheme, identity_chart, symmetry_defect, transformed_field,
)
from coupled_painleve.weyl import generator, generators


@pytest.mark.parametrize("system", SYSTEM_NAMES)
def test_every_generator_is_a_symmetry(system):
    s = build_system(system)
    for name, m in generators(system).items():
        assert check_symmetry(m, s, 25, random.Random(name)), name


def test_symmetry_negative_control():
    s3 = generator("D5", "s3")
    assert not check_symmetry(s3.with_params({}), build_system("D5"), 5)


def test_symmetry_negative_control_wrong_image():
    s4 = generator("B4", "s4")
    images = dict(s4.images)
    images["t"] = parse("t")
    bad = type(s4)("s4-no-reversal", "B4", images, dict(s4.param_images))
    assert not check_symmetry(bad, build_system("B4"), 5)


def test_symmetry_defect_vanishes_exactly():
    s = build_system("D5")
    p = s.sample_point(random.Random(4))
    assert set(symmetry_defect(generator("D5", "pi2"), s, p).values()) == {0}


def test_atlas_sizes():
    assert [len(chart_atlas(s)) for s in ("D5", "B4", "D4_2")] == [6, 5, 4]
    with pytest.raises(KeyError):
        chart_atlas("A4")


@pytest.mark.parametrize("system", ["D5", "B4", "D4_2"])
def test_charts_are_polynomial(system):
    s = build_system(system)
    assert check_chart(s, identity_chart(system), 2)
    for chart in chart_atlas(system):
        assert check_birational(chart)
        assert check_chart(s, chart, 3, rng=random.Random(chart.index)), chart.name


def test_chart_certificate_rejects_a_non_chart():
    s = build_system("D5")
    half = _chart("D5", 9, ["1/x", "y", "z", "w"], ["1/X", "Y", "Z", "W"])
    assert not check_chart(s, half, 3)


def test_chart_with_wrong_inverse_is_rejected():
    bad = _chart("D5", 8, ["1/x", "y", "z", "w"], ["X", "Y", "Z", "W"])
    with pytest.raises(NotBirational):
        check_chart(build_system("D5"), bad)


def test_chart_field_on_d5_chart_three():
    s = build_system("D5")
    chart = chart_atlas("D5")[3]
    p = s.sample_point(random.Random(5))
    p.update({"X": p["x"], "Y": p["y"], "Z": Fraction(1, 3), "W": Fraction(2)})
    out = chart_field_at(s, chart, p)
    assert len(out) == 4 and all(isinstance(v, Fraction) for v in out)


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_degenerations(name):
    scheme = degeneration_scheme(name)
    assert check_constraint_transport(scheme)
    assert check_symplectic(scheme, 5)
    assert check_inverse(scheme, 5)
    report = degeneration_report(scheme, 5)
    assert report.holds
    if scheme.has_eps:
        assert report.min_degree == 0


def test_d5_to_a4_limit_of_y_component():
    scheme = degeneration_scheme("D5->A4")
    a4 = build_system("A4")
    p = a4.sample_point(random.Random(6))
    got = transformed_field(scheme, p, 14)[1].truncate(6)
    assert got.coeff(0) == parse("-2*Y**2 + 2*X*Y + 2*T*Y + A1").evaluate(p)


def test_degeneration_negative_control():
    scheme = degeneration_scheme("D5->B4")
    subst = dict(scheme.var_subst)
    subst["y"] = parse("eps*t*y + eps")
    bad = replace(scheme, var_subst=subst)
    assert not check_degeneration(bad, 3)


def test_unscaled_time_leaves_a_pole():
    scheme = degeneration_scheme("D5->A4")
    subst = dict(scheme.var_subst)
    subst["t"] = parse("(1 + 2*eps*T)/(2*eps**3)")
    report = degeneration_report(replace(scheme, var_subst=subst), 2)
    assert not report.holds


def test_unknown_scheme():
    with pytest.raises(KeyError):
        degeneration_scheme("A4->D5")


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_subgroup_limits(name):
    scheme = degeneration_scheme(name)
    for entry in scheme.subgroup:
        r = check_subgroup_entry(scheme, entry, 5)
        assert r.holds, r


def test_printed_forms_are_checked_at_finite_eps():
    scheme = degeneration_scheme("D5->B4")
    s3 = next(e for e in scheme.subgroup if e.target_gen == "s3")
    r = check_subgroup_entry(scheme, s3, 3)
    assert r.printed_ok and r.printed_exact


def test_wrong_eps_action_is_inconsistent():
    scheme = degeneration_scheme("D5->B4")
    s3 = next(e for e in scheme.subgroup if e.target_gen == "s3")
    bad = replace(s3, eps_image=parse("eps"))
    r = check_subgroup_entry(scheme, bad, 3)
    assert not r.consistent and not r.holds


def test_wrong_branch_for_s3_is_inconsistent():
    scheme = degeneration_scheme("D5->A4")
    s3 = next(e for e in scheme.subgroup if e.target_gen == "s3")
    bad = replace(s3, eps_image=Binomial(parse("-eps"), s3.eps_image.u, s3.eps_image.c))
    assert not check_subgroup_entry(scheme, bad, 3).holds


def test_wrong_source_word_fails_the_limit():
    scheme = degeneration_scheme("D5->A4")
    bad = SubgroupEntry("s1", "s2", parse("eps"))
    assert not check_subgroup_entry(scheme, bad, 3).limit_ok


def test_irrational_eps_action_needs_formal_eps():
    scheme = degeneration_scheme("D5->A4")
    s0 = scheme.subgroup[0]
    p = build_system("A4").sample_point(random.Random(0))
    p["eps"] = Fraction(1, 7)
    with pytest.raises(ValueError):
        conjugated_action(scheme, s0, p, None)


def test_chart_dataclass_name():
    assert isinstance(chart_atlas("B4")[4], Chart)
    assert chart_atlas("B4")[4].name == "B4 chart 4"


def test_indeterminate_when_every_point_is_unlucky():
    s = build_system("D5")
    m = generator("D5", "s1")
    with pytest.raises(Indeterminate):
        check_symmetry(m, s, 1, _ZeroRng())


class _ZeroRng(random.Random):
    """Every coordinate comes out as 0/1, so t = 0 and the field is singular."""

    flip = False

    def randint(self, a, b):
        self.flip = not self.flip
        return 0 if self.flip else 1
