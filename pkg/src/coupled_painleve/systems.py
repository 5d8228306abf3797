"""Catalog of the coupled Painleve Hamiltonians and their printed systems.

Each system carries both the Hamiltonian and the right-hand side exactly as
printed alongside it; the two are kept apart so that a transcription slip in
either shows up as a failed coherence check instead of being absorbed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .polys import SYMBOLS, RatFunc, as_ratfunc, divides, parse
from .sampling import random_rational

SYSTEM_NAMES = ("D5", "B4", "D4_2", "B3", "A4")


@dataclass(frozen=True)
class ParamSpace:
    """Parameters subject to sum(weight_i * param_i) == target."""

    names: tuple[str, ...]
    weights: tuple[int, ...]
    target: Fraction = Fraction(1)

    def functional(self, values: Mapping[str, Fraction]):
        return sum(w * values[n] for n, w in zip(self.names, self.weights))

    def on_plane(self, values: Mapping[str, Fraction]) -> bool:
        return self.functional(values) == self.target

    def solve_for(self, fixed: Mapping[str, object] = ()) -> str:
        for n in self.names:
            if n not in fixed:
                return n
        raise ValueError("every parameter is fixed")

    def sample(self, rng: random.Random, fixed: Mapping[str, Fraction] | None = None,
               bound: int = 10**6) -> dict[str, Fraction]:
        fixed = dict(fixed or {})
        free = self.solve_for(fixed)
        vals = {n: Fraction(fixed[n]) if n in fixed else random_rational(rng, bound)
                for n in self.names if n != free}
        w = dict(zip(self.names, self.weights))
        rest = sum(w[n] * v for n, v in vals.items())
        vals[free] = (self.target - rest) / w[free]
        return {n: vals[n] for n in self.names}

    def eliminate(self, fixed: Mapping[str, Fraction] | None = None) -> dict[str, RatFunc]:
        """Symbolic bindings putting parameters on the plane (fixed ones as constants)."""
        fixed = dict(fixed or {})
        free = self.solve_for(fixed)
        w = dict(zip(self.names, self.weights))
        out: dict[str, RatFunc] = {n: RatFunc.const(Fraction(v)) for n, v in fixed.items()}
        expr = RatFunc.const(self.target)
        for n in self.names:
            if n != free:
                expr = expr - (out[n] if n in out else RatFunc.var(n)) * w[n]
        out[free] = expr / w[free]
        return out

    def describe(self) -> str:
        lhs = " + ".join(f"{w}*{n}" for n, w in zip(self.names, self.weights))
        return f"{lhs} = {self.target}"


@dataclass(frozen=True)
class InvariantDivisor:
    f: RatFunc
    condition: str
    value: Fraction = Fraction(0)
    label: str = ""


@dataclass
class HamiltonianSystem:
    name: str
    phase: tuple[str, str, str, str]
    time: str
    hamiltonian: RatFunc
    params: ParamSpace
    printed_rhs: tuple[RatFunc, ...] | None = None
    divisors: tuple[InvariantDivisor, ...] = ()
    _field: tuple[RatFunc, ...] | None = field(default=None, repr=False)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.phase + (self.time,)

    def vector_field(self) -> tuple[RatFunc, ...]:
        if self._field is None:
            q1, p1, q2, p2 = self.phase
            H = self.hamiltonian
            self._field = (H.diff(p1), -H.diff(q1), H.diff(p2), -H.diff(q2))
        return self._field

    def sample_point(self, rng: random.Random, fixed_params: Mapping[str, Fraction] | None = None,
                     bound: int = 10**6) -> dict[str, Fraction]:
        point = {v: random_rational(rng, bound) for v in self.variables}
        point.update(self.params.sample(rng, fixed_params, bound))
        return point


def build_HV(q: str, p: str, t: str, g1, g2, g3) -> RatFunc:
    """Second-order Painleve V Hamiltonian H_V(q, p, t; g1, g2, g3)."""
    q, p, t = RatFunc.var(q), RatFunc.var(p), RatFunc.var(t)
    g1, g2, g3 = as_ratfunc(g1), as_ratfunc(g2), as_ratfunc(g3)
    return (q * (q - 1) * p * (p + t) - (g1 + g3) * q * p + g1 * p + g2 * t * q) / t


def build_HIII(q: str, p: str, t: str, g0, g1) -> RatFunc:
    """Second-order Painleve III Hamiltonian; the third parameter g2 is implied."""
    q, p, t = RatFunc.var(q), RatFunc.var(p), RatFunc.var(t)
    g0, g1 = as_ratfunc(g0), as_ratfunc(g1)
    return (q * q * p * (p - 1) + q * ((g0 + g1) * p - g1) + t * p) / t


def _rhs(*lines: str) -> tuple[RatFunc, ...]:
    return tuple(parse(s) for s in lines)


def _d5() -> HamiltonianSystem:
    H = (build_HV("x", "y", "t", "a2+a5", "a1", "a2+2*a3+a4")
         + build_HV("z", "w", "t", "a5", "a3", "a4")
         + parse("2*y*z*((z-1)*w + a3)/t"))
    rhs = _rhs(
        "2*x**2*y/t + x**2 - 2*x*y/t - (1 + (2*a2+2*a3+a5+a4)/t)*x + (a2+a5)/t"
        " + 2*z*((z-1)*w + a3)/t",
        "-2*x*y**2/t + y**2/t - 2*x*y + (1 + (2*a2+2*a3+a5+a4)/t)*y - a1",
        "2*z**2*w/t + z**2 - 2*z*w/t - (1 + (a5+a4)/t)*z + a5/t + 2*y*z*(z-1)/t",
        "-2*z*w**2/t + w**2/t - 2*z*w + (1 + (a5+a4)/t)*w - a3 - 2*y*(-w + 2*z*w + a3)/t",
    )
    divs = tuple(
        InvariantDivisor(parse(f), cond, label=label)
        for label, f, cond in [
            ("f0", "y+t", "a0"), ("f1", "y", "a1"), ("f2", "x-z", "a2"),
            ("f3", "w", "a3"), ("f4", "z-1", "a4"), ("f5", "z", "a5"),
        ]
    )
    return HamiltonianSystem(
        "D5", ("x", "y", "z", "w"), "t", H,
        ParamSpace(tuple(f"a{i}" for i in range(6)), (1, 1, 2, 2, 1, 1)),
        rhs, divs,
    )


def _b4() -> HamiltonianSystem:
    H = (build_HIII("x", "y", "t", "a0", "a1")
         + build_HIII("z", "w", "t", "a0+a1+2*a2+a3", "a3")
         + parse("2*y*z*(z*w + a3)/t"))
    rhs = _rhs(
        "(2*x**2*y - x**2 + (a0+a1)*x + 2*a3*z + 2*z**2*w)/t + 1",
        "(-2*x*y**2 + 2*x*y - (a0+a1)*y + a1)/t",
        "(2*z**2*w - z**2 + (a0+a1+2*a2+2*a3)*z + 2*y*z**2)/t + 1",
        "(-2*z*w**2 + 2*z*w - (a0+a1+2*a2+2*a3)*w - 2*a3*y - 4*y*z*w + a3)/t",
    )
    divs = tuple(
        InvariantDivisor(parse(f), cond, label=label)
        for label, f, cond in [
            ("f0", "y-1", "a0"), ("f1", "y", "a1"), ("f2", "x-z", "a2"), ("f3", "w", "a3"),
        ]
    )
    return HamiltonianSystem(
        "B4", ("x", "y", "z", "w"), "t", H,
        ParamSpace(tuple(f"a{i}" for i in range(5)), (1, 1, 2, 2, 2)),
        rhs, divs,
    )


def _d4_2() -> HamiltonianSystem:
    H = parse(
        "(x**2*y**2 + (1-2*b1-2*b2-2*b3)*x*y - x)/t + y"
        " + (z**2*w**2 + (1-2*b3)*z*w)/t + w + 2*y*z*(z*w + b2)/t"
    )
    rhs = _rhs(
        "(2*x**2*y + (1-2*b1-2*b2-2*b3)*x + 2*z*(z*w + b2))/t + 1",
        "(-2*x*y**2 - (1-2*b1-2*b2-2*b3)*y + 1)/t",
        "(2*z**2*w + (1-2*b3)*z)/t + 1 + 2*y*z**2/t",
        "(-2*z*w**2 - (1-2*b3)*w - 2*b2*y - 4*y*z*w)/t",
    )
    divs = (
        InvariantDivisor(parse("x-z"), "b1", label="f0"),
        InvariantDivisor(parse("w"), "b2", label="f1"),
    )
    return HamiltonianSystem(
        "D4_2", ("x", "y", "z", "w"), "t", H,
        ParamSpace(("b1", "b2", "b3", "b4"), (2, 2, 2, 2)),
        rhs, divs,
    )


def _b3() -> HamiltonianSystem:
    H = parse(
        "x**2*y**2/t - (a0+a1+2*a2-1)*x*y/t - x/t + y"
        " + z**2*w**2/t - z**2*w + (a0+a1-1)*z*w/t - a1*z - 2*y*w/t"
    )
    rhs = _rhs(
        "2*x**2*y/t - (a0+a1+2*a2-1)*x/t + 1 - 2*w/t",
        "-2*x*y**2/t + (a0+a1+2*a2-1)*y/t + 1/t",
        "2*z**2*w/t - z**2 + (a0+a1-1)*z/t - 2*y/t",
        "-2*z*w**2/t + 2*z*w - (a0+a1-1)*w/t + a1",
    )
    return HamiltonianSystem(
        "B3", ("x", "y", "z", "w"), "t", H,
        ParamSpace(("a0", "a1", "a2", "a3"), (1, 1, 2, 2)),
        rhs,
    )


def _a4() -> HamiltonianSystem:
    H = parse(
        "-X**2*Y + 2*X*Y**2 - 2*T*X*Y - (2*A2+2*A4)*Y - A1*X"
        " - Z**2*W + 2*Z*W**2 - 2*T*Z*W - 2*A4*W - A3*Z + 4*Y*Z*W"
    )
    rhs = _rhs(
        "-X**2 + 4*X*Y + 4*Z*W - 2*T*X - 2*A2 - 2*A4",
        "-2*Y**2 + 2*X*Y + 2*T*Y + A1",
        "-Z**2 + 4*Z*W + 4*Y*Z - 2*T*Z - 2*A4",
        "-2*W**2 + 2*Z*W - 4*Y*W + 2*T*W + A3",
    )
    return HamiltonianSystem(
        "A4", ("X", "Y", "Z", "W"), "T", H,
        ParamSpace(tuple(f"A{i}" for i in range(5)), (1, 1, 1, 1, 1)),
        rhs,
    )


_BUILDERS = {"D5": _d5, "B4": _b4, "D4_2": _d4_2, "B3": _b3, "A4": _a4}


@lru_cache(maxsize=None)
def build_system(name: str) -> HamiltonianSystem:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown system {name!r}; expected one of {SYSTEM_NAMES}") from None


def vector_field(sys: HamiltonianSystem) -> tuple[RatFunc, ...]:
    return sys.vector_field()


def lie_derivative(sys: HamiltonianSystem, f: RatFunc) -> RatFunc:
    """Derivative of f along the flow, including explicit time dependence."""
    out = f.diff(sys.time)
    for v, rhs in zip(sys.phase, sys.vector_field()):
        dv = f.diff(v)
        if dv:
            out = out + dv * rhs
    return out


def check_invariant_divisor(sys: HamiltonianSystem, d: InvariantDivisor) -> bool:
    """f divides the t-cleared numerator of its Lie derivative on the condition."""
    if d.condition not in sys.params.names:
        raise KeyError(f"{d.condition} is not a parameter of {sys.name}")
    bindings = sys.params.eliminate({d.condition: d.value})
    L = lie_derivative(sys, d.f).substitute(bindings)
    if L.den.variables() & set(sys.phase):
        raise ValueError("Lie derivative has a non-global denominator")
    f = d.f.substitute(bindings)
    if not f.is_polynomial():
        raise ValueError("divisor must be polynomial")
    return divides(f.num, L.num)


def phase_degree(sys: HamiltonianSystem) -> int:
    """Total degree of the Hamiltonian in the phase variables."""
    H = sys.hamiltonian
    if H.den.variables() & set(sys.phase):
        raise ValueError("Hamiltonian is not polynomial in the phase variables")
    return H.num.total_degree(sys.phase)


def weighted_degree(sys: HamiltonianSystem, weights: tuple[int, int, int, int] = (1, 2, 1, 2)) -> int:
    """Degree of the Hamiltonian when the phase variables carry the given weights."""
    H = sys.hamiltonian
    if H.den.variables() & set(sys.phase):
        raise ValueError("Hamiltonian is not polynomial in the phase variables")
    pos = [SYMBOLS.position(v) for v in sys.phase]
    return max(sum(e[p] * w for p, w in zip(pos, weights)) for e, _ in H.num.sorted_terms())


def export_text(sys: HamiltonianSystem) -> str:
    """Deterministic plain-text rendering used for golden files."""
    lines = [
        f"system {sys.name}",
        f"phase {' '.join(sys.phase)}",
        f"time {sys.time}",
        f"params {' '.join(sys.params.names)}",
        f"constraint {sys.params.describe()}",
        f"H = {sys.hamiltonian.to_text()}",
    ]
    for v, f in zip(sys.phase, sys.vector_field()):
        lines.append(f"d{v}/d{sys.time} = {f.to_text()}")
    return "\n".join(lines) + "\n"
