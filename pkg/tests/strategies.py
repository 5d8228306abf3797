from fractions import Fraction

from hypothesis import strategies as st

from coupled_painleve.polys import MPoly, RatFunc

VARS = ("x", "y", "z", "w", "t")

small_fractions = st.builds(
    Fraction,
    st.integers(-50, 50),
    st.integers(1, 20),
)

nonzero_fractions = small_fractions.filter(bool)


@st.composite
def polys(draw, variables=VARS, max_terms=5, max_exp=3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(0, max_exp)) for _ in variables)
        terms[exps] = draw(small_fractions)
    p = MPoly.const(0)
    for exps, c in terms.items():
        m = MPoly.const(c)
        for v, k in zip(variables, exps):
            if k:
                m = m * MPoly.var(v, k)
        p = p + m
    return p


@st.composite
def ratfuncs(draw, variables=VARS):
    num = draw(polys(variables))
    den = draw(polys(variables, max_terms=3, max_exp=2).filter(lambda p: not p.is_zero()))
    return RatFunc(num, den)


points = st.fixed_dictionaries({v: small_fractions for v in VARS})
