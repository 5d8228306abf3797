import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coupled_painleve.polys import parse
from coupled_painleve.systems import SYSTEM_NAMES, build_system
from coupled_painleve.weyl import (
    PRESENTATIONS, TRANSLATIONS, ParamMap, TranslationWord, compose, format_word, generator, generators,
    is_identity, parse_word, power, restricted_to_plane, translation_shift, verify_presentation,
    verify_relation,
)

F = Fraction


def test_d5_s2_at_a_point():
    point = {"x": F(2), "y": F(3), "z": F(1), "w": F(5), "t": F(7),
             "a0": F(1, 3), "a1": F(1, 5), "a2": F(1), "a3": F(2, 7), "a4": F(1, 11), "a5": F(0)}
    img = generator("D5", "s2").apply(point)
    assert [img[v] for v in "xyzwt"] == [2, 2, 1, 6, 7]
    assert [img[f"a{i}"] for i in range(6)] == [F(4, 3), F(6, 5), -1, F(9, 7), F(1, 11), 0]


def test_d5_s0_degenerates_to_identity():
    rng = random.Random(0)
    s = build_system("D5")
    for _ in range(5):
        p = s.sample_point(rng, {"a0": F(0)})
        q = generator("D5", "s0").apply(p)
        assert all(q[k] == p[k] for k in p)


def test_b4_pi2_images():
    m = generator("B4", "pi2")
    expected = {"x": "t/z", "y": "-(z/t)*(z*w + a3)", "z": "t/x", "w": "-(x/t)*(x*y + a1)"}
    for v, e in expected.items():
        assert m.image(v).same_as(parse(e))
    assert m.time_action == "identity"
    images = [m.param_map.apply(tuple(parse(f"a{i}") for i in range(5)))[i] for i in range(5)]
    for got, want in zip(images, ["2*a4 + a3", "a3", "a2", "a1", "(a0 - a1)/2"]):
        assert got.same_as(parse(want))


def test_unknown_generator():
    with pytest.raises(KeyError):
        generator("D5", "s9")


@pytest.mark.parametrize("system", SYSTEM_NAMES)
def test_parameter_actions_preserve_constraint(system):
    space = build_system(system).params
    for m in generators(system).values():
        assert m.param_map.preserves(space), m


@pytest.mark.parametrize("system", SYSTEM_NAMES)
def test_generators_are_involutions(system):
    for name, m in generators(system).items():
        assert is_identity(power(m, 2), 10, random.Random(name)), name


def test_time_actions():
    reversing = {("D5", "pi2"), ("D5", "pi3"), ("D5", "pi4"), ("B4", "s4"), ("B4", "pi1"),
                 ("D4_2", "w3"), ("D4_2", "w4"), ("B3", "s3"), ("B3", "pi")}
    for system in SYSTEM_NAMES:
        for name, m in generators(system).items():
            want = "reversal" if (system, name) in reversing else "identity"
            assert m.time_action == want, (system, name)


def test_compose_and_words():
    s4s5 = compose(generator("D5", "s4"), generator("D5", "s5"))
    s5s4 = compose(generator("D5", "s5"), generator("D5", "s4"))
    assert format_word(s4s5) == "s4 s5"
    rng = random.Random(1)
    s = build_system("D5")
    for _ in range(5):
        p = s.sample_point(rng)
        assert s4s5.apply(p) == s5s4.apply(p)


def test_pi4_is_pi2_pi3_pi2():
    assert is_identity(parse_word("D5", "pi4 pi2 pi3 pi2"), 10, random.Random(0))


def test_non_relation_is_detected():
    assert not is_identity(power(parse_word("B4", "s3 s4"), 2), 10, random.Random(0))
    assert not is_identity(parse_word("D5", "s2 s3"), 10, random.Random(0))


def test_expand_matches_word_evaluation():
    word = parse_word("D5", "s2 s3 s2")
    flat = word.expand()
    rng = random.Random(3)
    s = build_system("D5")
    for _ in range(5):
        p = s.sample_point(rng)
        a, b = word.apply(p), flat.apply(p)
        assert all(a[k] == b[k] for k in s.variables + s.params.names)


@pytest.mark.parametrize("system", ["D5", "B4", "D4_2"])
def test_presentation_relations(system):
    results = verify_presentation(system, 10, random.Random(system))
    assert results and all(r.holds for r in results)
    assert all(r.minimal is not False for r in results)


def test_order_four_relations_are_exact():
    assert verify_relation("B4", "s3 s4", 4).minimal
    for w in ("w1 w4", "w2 w3"):
        assert verify_relation("D4_2", w, 4).minimal


def test_presentations_only_use_cataloged_generators():
    for system, pres in PRESENTATIONS.items():
        for word, _ in pres.relations:
            parse_word(system, word)


def test_translation_vectors():
    expected = {
        "D5": {"T1": (0, 0, 0, 0, 1, -1), "T2": (-1, 1, 0, 0, 0, 0), "T3": (0, 0, 0, 1, -1, -1),
               "T4": (1, 1, -1, 0, 0, 0)},
        "B4": {"T1": (1, -1, 0, 0, 0), "T2": (-1, -1, 1, 0, 0), "T3": (0, 0, -1, 1, 0),
               "T4": (0, 0, 0, -1, 1)},
        "D4_2": {"T1": (1, -1, 0, 0), "T2": (0, -1, 1, 0), "T3": (0, 0, -1, 1)},
    }
    for system, table in expected.items():
        words = {t.name: t for t in TRANSLATIONS[system]}
        for name, shift in table.items():
            assert translation_shift(words[name]) == tuple(F(v) for v in shift), (system, name)


def test_d5_conjugated_translations():
    words = {t.name: t for t in TRANSLATIONS["D5"]}
    # T5 is s1 T4 s1; conjugating T4's shift by s1's linear part gives this vector
    assert translation_shift(words["T5"]) == tuple(F(v) for v in (1, -1, 0, 0, 0, 0))
    assert translation_shift(words["T6"]) == tuple(F(v) for v in (0, 0, 1, -1, 0, 0))


def test_reflection_is_not_a_translation():
    from coupled_painleve.weyl import NotATranslation
    with pytest.raises(NotATranslation):
        translation_shift(TranslationWord("D5", "s2", "s2", None))


def test_plane_restriction_agrees_on_the_plane():
    space = build_system("D5").params
    pm = parse_word("D5", "pi1 s5 s3 s2 s1 s0 s2 s3 s5").param_map
    r = restricted_to_plane(pm, space)
    rng = random.Random(2)
    for _ in range(5):
        alpha = space.sample(rng)
        vec = tuple(alpha[n] for n in space.names)
        assert pm.apply(vec) == r.apply(vec)


@given(st.lists(st.sampled_from(["s0", "s1", "s2", "s3", "s4", "s5", "pi1", "pi2"]), min_size=1, max_size=6))
def test_word_times_reverse_is_identity(letters):
    word = " ".join(letters + letters[::-1])
    assert is_identity(parse_word("D5", word), 3, random.Random(0))


@given(st.lists(st.sampled_from(["w1", "w2", "w3", "w4"]), min_size=1, max_size=8))
def test_param_maps_compose_like_words(letters):
    word = parse_word("D4_2", " ".join(letters))
    names = build_system("D4_2").params.names
    pm = ParamMap.identity(names)
    for g in letters:
        pm = pm.then(generator("D4_2", g).param_map)
    assert pm == word.param_map
