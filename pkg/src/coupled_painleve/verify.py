"""Checks of symmetry, holomorphy charts and degeneration limits.

Everything here is exact: maps are evaluated at seeded rational points and
limits are expanded as truncated Laurent series in eps with rational
coefficients, one point at a time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .polys import RatFunc, UnluckyPoint, parse
from .sampling import Indeterminate, MAX_RESAMPLES, random_rational
from .series import DEFAULT_ORDER, EPS, EpsSeries, PrecisionError, binomial, series_expand
from .systems import HamiltonianSystem, build_system
from .weyl import BirationalMap, generator, parse_word


def _run_points(rng, sample, body, points):
    """Evaluate body at ``points`` good samples; False as soon as one fails."""
    good = misses = 0
    while good < points:
        p = sample(rng)
        try:
            ok = body(p)
        except (UnluckyPoint, ZeroDivisionError):
            misses += 1
            if misses > MAX_RESAMPLES:
                raise Indeterminate(f"{misses} unlucky points") from None
            continue
        if not ok:
            return False
        good += 1
    return True


# ---------------------------------------------------------------------------
# symmetry

def symmetry_defect(m: BirationalMap, sys: HamiltonianSystem, point: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """Pushed-forward field minus the field at the image point (zero for a symmetry)."""
    field_ = sys.vector_field()
    tangent = {v: f.evaluate(point) for v, f in zip(sys.phase, field_)}
    tangent[sys.time] = Fraction(1)
    img, vel = m.push(point, tangent)
    dt = vel[sys.time]
    return {v: vel[v] - f.evaluate(img) * dt for v, f in zip(sys.phase, field_)}


def check_symmetry(m: BirationalMap, sys: HamiltonianSystem | None = None, points: int = 25,
                   rng: random.Random | None = None) -> bool:
    """The map sends the vector field to itself (with transformed parameters and time)."""
    sys = sys or m.sys()
    rng = rng or random.Random(0)
    return _run_points(
        rng, sys.sample_point,
        lambda p: all(d == 0 for d in symmetry_defect(m, sys, p).values()),
        points,
    )


# ---------------------------------------------------------------------------
# holomorphy charts

@dataclass(frozen=True)
class Chart:
    """Coordinate change (x,y,z,w) -> chart coordinates, named X,Y,Z,W here."""

    system: str
    index: int
    forward: Mapping[str, RatFunc]   # chart coordinate -> expression in x,y,z,w,t,params
    inverse: Mapping[str, RatFunc]   # phase variable -> expression in X,Y,Z,W,t,params

    @property
    def name(self) -> str:
        return f"{self.system} chart {self.index}"


CHART_VARS = ("X", "Y", "Z", "W")


def _chart(system, index, forward, inverse):
    return Chart(system, index,
                 {c: parse(e) for c, e in zip(CHART_VARS, forward)},
                 {v: parse(e) for v, e in zip(("x", "y", "z", "w"), inverse)})


def chart_atlas(system: str) -> list[Chart]:
    if system == "D5":
        return [
            _chart("D5", 0, ["1/x", "-((y+t)*x + a0)*x", "z", "w"],
                   ["1/X", "-Y*X**2 - a0*X - t", "Z", "W"]),
            _chart("D5", 1, ["1/x", "-(y*x + a1)*x", "z", "w"],
                   ["1/X", "-Y*X**2 - a1*X", "Z", "W"]),
            _chart("D5", 2, ["-((x-z)*y - a2)*y", "1/y", "z", "w+y"],
                   ["Z + a2*Y - X*Y**2", "1/Y", "Z", "W - 1/Y"]),
            _chart("D5", 3, ["x", "y", "1/z", "-(w*z + a3)*z"],
                   ["X", "Y", "1/Z", "-W*Z**2 - a3*Z"]),
            _chart("D5", 4, ["x", "y", "-((z-1)*w - a4)*w", "1/w"],
                   ["X", "Y", "1 + a4*W - Z*W**2", "1/W"]),
            _chart("D5", 5, ["x", "y", "-(z*w - a5)*w", "1/w"],
                   ["X", "Y", "a5*W - Z*W**2", "1/W"]),
        ]
    if system == "B4":
        return [
            _chart("B4", 0, ["1/x", "-((y-1)*x + a0)*x", "z", "w"],
                   ["1/X", "1 - Y*X**2 - a0*X", "Z", "W"]),
            _chart("B4", 1, ["1/x", "-(y*x + a1)*x", "z", "w"],
                   ["1/X", "-Y*X**2 - a1*X", "Z", "W"]),
            _chart("B4", 2, ["-((x-z)*y - a2)*y", "1/y", "z", "w+y"],
                   ["Z + a2*Y - X*Y**2", "1/Y", "Z", "W - 1/Y"]),
            _chart("B4", 3, ["x", "y", "1/z", "-(w*z + a3)*z"],
                   ["X", "Y", "1/Z", "-W*Z**2 - a3*Z"]),
            _chart("B4", 4, ["x", "y", "z", "w - 2*a4/z + t/z**2"],
                   ["X", "Y", "Z", "W + 2*a4/Z - t/Z**2"]),
        ]
    if system == "D4_2":
        return [
            _chart("D4_2", 1, ["-((x-z)*y - b1)*y", "1/y", "z", "w+y"],
                   ["Z + b1*Y - X*Y**2", "1/Y", "Z", "W - 1/Y"]),
            _chart("D4_2", 2, ["x", "y", "1/z", "-(w*z + b2)*z"],
                   ["X", "Y", "1/Z", "-W*Z**2 - b2*Z"]),
            _chart("D4_2", 3, ["x", "y", "z", "w - 2*b3/z + t/z**2"],
                   ["X", "Y", "Z", "W + 2*b3/Z - t/Z**2"]),
            _chart("D4_2", 4, ["x + 2*b4/y - 1/y**2", "y", "z", "w"],
                   ["X - 2*b4/Y + 1/Y**2", "Y", "Z", "W"]),
        ]
    raise KeyError(f"no chart atlas for {system!r}")


def identity_chart(system: str) -> Chart:
    return _chart(system, -1, ["x", "y", "z", "w"], ["X", "Y", "Z", "W"])


class NotBirational(ValueError):
    pass


def chart_field_at(sys: HamiltonianSystem, chart: Chart, point: Mapping[str, Fraction]) -> list[Fraction]:
    """Vector field in chart coordinates at a point given in chart coordinates."""
    orig = dict(point)
    for v, e in chart.inverse.items():
        orig[v] = e.evaluate(point)
    field_ = [f.evaluate(orig) for f in sys.vector_field()]
    out = []
    for c in CHART_VARS:
        fc = chart.forward[c]
        acc = fc.diff(sys.time).evaluate(orig) if sys.time in fc.variables() else Fraction(0)
        for v, fv in zip(sys.phase, field_):
            if v in fc.variables():
                acc += fc.diff(v).evaluate(orig) * fv
        out.append(acc)
    return out


def check_birational(chart: Chart, points: int = 10, rng: random.Random | None = None) -> bool:
    sys = build_system(chart.system)
    rng = rng or random.Random(0)

    def round_trip(p):
        img = dict(p)
        for c, e in chart.forward.items():
            img[c] = e.evaluate(p)
        back = {v: e.evaluate(img) for v, e in chart.inverse.items()}
        return all(back[v] == p[v] for v in sys.phase)

    return _run_points(rng, sys.sample_point, round_trip, points)


def _interpolate_eval(xs: Sequence[Fraction], ys: Sequence[Fraction], x: Fraction) -> Fraction:
    """Lagrange interpolant through (xs, ys) evaluated at x."""
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = yi
        for j, xj in enumerate(xs):
            if j != i:
                term = term * (x - xj) / (xi - xj)
        total += term
    return total


def check_chart(sys: HamiltonianSystem, chart: Chart, points: int = 5, degree_bound: int = 8,
                extra: int = 3, rng: random.Random | None = None) -> bool:
    """Polynomiality certificate for the system rewritten in a chart.

    On random lines a + s*b in chart coordinates (time and parameters fixed at
    random rationals on the constraint plane) each component times t must
    agree with its degree-``degree_bound`` interpolant at ``extra`` further
    random nodes.
    """
    rng = rng or random.Random(0)
    if not check_birational(chart, rng=rng):
        raise NotBirational(chart.name)
    tv = sys.time

    def line_ok(p):
        base = {c: random_rational(rng) for c in CHART_VARS}
        direction = {c: random_rational(rng) for c in CHART_VARS}
        nodes = [Fraction(k) for k in range(degree_bound + 1)]
        probes = [random_rational(rng) for _ in range(extra)]
        vals = []
        for s in nodes + probes:
            q = dict(p)
            q.update({c: base[c] + s * direction[c] for c in CHART_VARS})
            vals.append([v * p[tv] for v in chart_field_at(sys, chart, q)])
        for comp in range(4):
            ys = [row[comp] for row in vals[: len(nodes)]]
            for s, row in zip(probes, vals[len(nodes):]):
                if _interpolate_eval(nodes, ys, s) != row[comp]:
                    return False
        return True

    return _run_points(rng, sys.sample_point, line_ok, points)


# ---------------------------------------------------------------------------
# degenerations

@dataclass(frozen=True)
class Binomial:
    """base * (1 + u)**c, expandable only as a series in eps."""

    base: RatFunc
    u: RatFunc
    c: Fraction

    def series(self, lift: "_Lift"):
        return lift(self.base) * binomial(lift(self.u), self.c)


@dataclass
class SubgroupEntry:
    """Target generator realized by a source word, with the induced action on eps."""

    target_gen: str
    source_word: str
    eps_image: RatFunc | Binomial | None = None
    printed: Mapping[str, RatFunc | Binomial] = field(default_factory=dict)   # valid at finite eps
    printed_limit: Mapping[str, RatFunc] = field(default_factory=dict)        # valid at eps**0 only

    @property
    def rational_eps(self) -> bool:
        return not isinstance(self.eps_image, Binomial)


@dataclass
class DegenerationScheme:
    """Change of parameters and variables from a source to a target system.

    ``param_subst`` and ``var_subst`` express the source quantities through the
    target ones (and eps); ``inverse_param`` and ``inverse_var`` go back.  The
    two sides live in separate point dictionaries, so a target may reuse the
    source's symbol names.
    """

    name: str
    source: str
    target: str
    param_subst: Mapping[str, RatFunc]
    var_subst: Mapping[str, RatFunc]
    inverse_param: Mapping[str, RatFunc]
    inverse_var: Mapping[str, RatFunc]
    subgroup: Sequence[SubgroupEntry] = ()
    has_eps: bool = True


def _p(d: Mapping[str, str]) -> dict[str, RatFunc]:
    return {k: parse(v) for k, v in d.items()}


def _d5_to_a4() -> DegenerationScheme:
    den = "(X - 2*Y - 2*W + 2*T)"
    s0_eps = Binomial(parse("eps"), parse("2*A0*eps**2"), Fraction(-1, 2))
    s3_eps = Binomial(parse("eps"), parse("-2*A3*eps**2"), Fraction(-1, 2))
    return DegenerationScheme(
        "D5->A4", "D5", "A4",
        param_subst=_p({
            "a0": "A0 - A2 - A3 + 1/(2*eps**2)", "a1": "A1", "a2": "A2", "a3": "A3",
            "a4": "-1/(2*eps**2)", "a5": "A4",
        }),
        var_subst=_p({
            "t": "(1 + 2*eps*T)/(2*eps**2)",
            "x": "-eps*X/(1 - eps*X)",
            "y": "-(1 - eps*X)*(Y - eps*(A1 + X*Y))/eps",
            "z": "-eps*Z/(1 - eps*Z)",
            "w": "-(1 - eps*Z)*(W - eps*(A3 + Z*W))/eps",
        }),
        inverse_param=_p({
            "A0": "a0 + a2 + a3 - 1/(2*eps**2)", "A1": "a1", "A2": "a2", "A3": "a3", "A4": "a5",
        }),
        inverse_var=_p({
            "T": "(2*eps**2*t - 1)/(2*eps)",
            "X": "x/(eps*(x - 1))",
            "Y": "-eps*(x - 1)*(y*(x - 1) + a1)",
            "Z": "z/(eps*(z - 1))",
            "W": "-eps*(z - 1)*(w*(z - 1) + a3)",
        }),
        subgroup=[
            SubgroupEntry(
                "s0", "s0 s2 s3 s4 s3 s2 s0", s0_eps,
                {"T": Binomial(parse("T - A0*eps"), parse("2*A0*eps**2"), Fraction(-1, 2))},
                _p({"X": f"X - 2*A0/{den}", "Y": f"Y - A0/{den}", "Z": f"Z - 2*A0/{den}", "W": "W"}),
            ),
            SubgroupEntry("s1", "s1", parse("eps"), _p({
                "X": "X + A1/Y", "Y": "Y", "Z": "Z", "W": "W", "T": "T"})),
            SubgroupEntry("s2", "s2", parse("eps"), _p({
                "X": "X", "Y": "Y - A2/(X-Z)", "Z": "Z", "W": "W + A2/(X-Z)", "T": "T"})),
            SubgroupEntry(
                "s3", "s3", s3_eps,
                {"T": Binomial(parse("T + A3*eps"), parse("-2*A3*eps**2"), Fraction(-1, 2))},
                _p({"X": "X", "Y": "Y", "Z": "Z + A3/W", "W": "W"}),
            ),
            SubgroupEntry("s4", "s5", parse("eps"), _p({
                "X": "X", "Y": "Y", "Z": "Z", "W": "W - A4/Z", "T": "T"})),
        ],
    )


# the B4 system reuses x, y, z, w, t, a0..a4; its formulas are written with
# capitals and renamed afterwards
_B4_NAMES = {"X": "x", "Y": "y", "Z": "z", "W": "w", "T": "t",
             **{f"A{i}": f"a{i}" for i in range(5)}}


def _to_target(expr, names: Mapping[str, str]):
    if isinstance(expr, Binomial):
        return Binomial(_to_target(expr.base, names), _to_target(expr.u, names), expr.c)
    return expr.substitute({k: RatFunc.var(v) for k, v in names.items() if k in expr.variables()})


def _d5_to_b4() -> DegenerationScheme:
    r = lambda d: {k: _to_target(v, _B4_NAMES) for k, v in _p(d).items()}
    rk = lambda d: {_B4_NAMES[k]: v for k, v in _p(d).items()}
    printed = lambda d: {_B4_NAMES[k]: _to_target(v, _B4_NAMES) for k, v in _p(d).items()}
    return DegenerationScheme(
        "D5->B4", "D5", "B4",
        param_subst=r({
            "a0": "A0", "a1": "A1", "a2": "A2", "a3": "A3", "a4": "2*A4 - 1/eps", "a5": "1/eps",
        }),
        var_subst=r({
            "t": "-eps*T",
            "x": "1 + X/(eps*T)", "y": "eps*T*Y",
            "z": "1 + Z/(eps*T)", "w": "eps*T*W",
        }),
        inverse_param=rk({"A0": "a0", "A1": "a1", "A2": "a2", "A3": "a3", "A4": "(a4 + a5)/2"}),
        inverse_var=rk({
            "T": "-t/eps",
            "X": "-t*(x - 1)", "Y": "-y/t",
            "Z": "-t*(z - 1)", "W": "-w/t",
        }),
        subgroup=[
            SubgroupEntry("s0", "s0", parse("eps"), printed({
                "X": "X + A0/(Y-1)", "Y": "Y", "Z": "Z", "W": "W", "T": "T"})),
            SubgroupEntry("s1", "s1", parse("eps"), printed({
                "X": "X + A1/Y", "Y": "Y", "Z": "Z", "W": "W", "T": "T"})),
            SubgroupEntry("s2", "s2", parse("eps"), printed({
                "X": "X", "Y": "Y - A2/(X-Z)", "Z": "Z", "W": "W + A2/(X-Z)", "T": "T"})),
            SubgroupEntry("s3", "s3", _to_target(parse("eps/(1 + eps*A3)"), _B4_NAMES), printed({
                "X": "X", "Y": "Y", "Z": "Z + A3/W", "W": "W", "T": "T*(1 + eps*A3)"})),
            SubgroupEntry("s4", "s4 s5", parse("-eps"), printed({
                "X": "X", "Y": "Y", "Z": "Z",
                "W": "(T + eps*T*Z*W + Z**2*W)/(Z*(eps*T + Z)) - 2*A4/Z", "T": "-T"})),
        ],
    )


def _d4_2_to_b3() -> DegenerationScheme:
    return DegenerationScheme(
        "D4_2->B3", "D4_2", "B3",
        param_subst=_p({"b1": "a2", "b2": "a1", "b3": "(a0 - a1)/2", "b4": "a3"}),
        var_subst=_p({"t": "t", "x": "x", "y": "y", "z": "1/z", "w": "-w*z**2 - a1*z"}),
        inverse_param=_p({"a0": "b2 + 2*b3", "a1": "b2", "a2": "b1", "a3": "b4"}),
        inverse_var=_p({"t": "t", "x": "x", "y": "y", "z": "1/z", "w": "-(z*w + b2)*z"}),
        subgroup=[
            SubgroupEntry("s0", "w3 w2 w3"),
            SubgroupEntry("s1", "w2"),
            SubgroupEntry("s2", "w1"),
            SubgroupEntry("s3", "w4"),
        ],
        has_eps=False,
    )


_SCHEMES = {"D5->A4": _d5_to_a4, "D5->B4": _d5_to_b4, "D4_2->B3": _d4_2_to_b3}
SCHEME_NAMES = tuple(_SCHEMES)


def degeneration_scheme(name: str) -> DegenerationScheme:
    try:
        return _SCHEMES[name]()
    except KeyError:
        raise KeyError(f"unknown degeneration {name!r}") from None


def _solve(matrix: list[list[Any]], rhs: list[Any]) -> list[Any]:
    """Gaussian elimination over a field (Fractions or Laurent series)."""
    n = len(rhs)
    a = [row[:] + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        candidates = [r for r in range(col, n) if a[r][col]]
        if not candidates:
            raise PrecisionError("singular Jacobian or precision exhausted")
        # the lowest-valuation pivot loses the least relative precision
        piv = min(candidates, key=lambda r: getattr(a[r][col], "min_degree", 0))
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] * (1 / a[i][i]) for i in range(n)]


class _Lift:
    """Evaluates RatFuncs at a numeric point, with eps numeric or formal (order given)."""

    def __init__(self, point: Mapping[str, Fraction], order: int | None):
        self.point = dict(point)
        self.order = order

    def __call__(self, f: RatFunc):
        if self.order is None:
            return f.evaluate(self.point)
        if EPS not in f.variables():
            return EpsSeries(0, [f.evaluate(self.point)], self.order)
        return series_expand(f, self.order, self.point)

    def value(self, f):
        return f.series(self) if isinstance(f, Binomial) else self(f)


def _target_point(scheme: DegenerationScheme, rng: random.Random, bound: int) -> dict[str, Fraction]:
    return build_system(scheme.target).sample_point(rng, bound=bound)


def _source_point(scheme: DegenerationScheme, lift: _Lift) -> dict[str, Any]:
    src = {k: lift(e) for k, e in scheme.param_subst.items()}
    src.update({k: lift(e) for k, e in scheme.var_subst.items()})
    return src


def transformed_field(scheme: DegenerationScheme, point: Mapping[str, Fraction],
                      order: int | None) -> list[Any]:
    """d(target vars)/d(target time) along the source flow, at a target point.

    Only the forward substitution is used: with v = phi(V, T) and t = tau(T),
    J_V(phi) dV/dT = F(phi) dtau/dT - dphi/dT.
    """
    ssys, tsys = build_system(scheme.source), build_system(scheme.target)
    lift = _Lift(point, order)
    src = _source_point(scheme, lift)
    F = [f.evaluate(src) for f in ssys.vector_field()]
    dtau = lift(scheme.var_subst[ssys.time].diff(tsys.time))
    jac = [[lift(scheme.var_subst[v].diff(V)) for V in tsys.phase] for v in ssys.phase]
    rhs = [Fv * dtau - lift(scheme.var_subst[v].diff(tsys.time)) for v, Fv in zip(ssys.phase, F)]
    return _solve(jac, rhs)


def _with_precision(fn, order: int, guard_start: int = 8, guard_max: int = 64):
    """fn(working_order), retried with more guard terms when precision runs out."""
    guard = guard_start
    while True:
        try:
            return fn(order + guard)
        except PrecisionError:
            if guard >= guard_max:
                raise
            guard *= 2


@dataclass
class DegenerationResult:
    scheme: str
    holds: bool
    min_degree: int | None = None
    witnesses: list[dict[str, str]] = field(default_factory=list)


def degeneration_report(scheme: DegenerationScheme, points: int = 10, order: int = DEFAULT_ORDER,
                        rng: random.Random | None = None, bound: int = 10**6) -> DegenerationResult:
    """No poles in eps, and the eps**0 term equals the target field, exactly at each point."""
    rng = rng or random.Random(0)
    tfield = build_system(scheme.target).vector_field()
    mins: list[int] = []
    witnesses: list[dict[str, str]] = []

    def body(p):
        expected = [f.evaluate(p) for f in tfield]
        if not scheme.has_eps:
            ok = transformed_field(scheme, p, None) == expected
        else:
            def attempt(work):
                got = transformed_field(scheme, p, work)
                if any(s.order < order for s in got):
                    raise PrecisionError("result order below request")
                return [s.truncate(order) for s in got]

            got = _with_precision(attempt, order)
            mins.extend(s.min_degree for s in got)
            ok = all(s.min_degree >= 0 and s.coeff(0) == e for s, e in zip(got, expected))
        if len(witnesses) < 3:
            witnesses.append({k: str(v) for k, v in sorted(p.items())})
        return ok

    holds = _run_points(rng, lambda r: _target_point(scheme, r, bound), body, points)
    return DegenerationResult(scheme.name, holds, min(mins) if mins else None, witnesses)


def check_degeneration(scheme: DegenerationScheme, points: int = 10, order: int = DEFAULT_ORDER,
                       rng: random.Random | None = None, bound: int = 10**6) -> bool:
    return degeneration_report(scheme, points, order, rng, bound).holds


def check_constraint_transport(scheme: DegenerationScheme) -> bool:
    """The source constraint, pulled back, is the target constraint (symbolic, eps free)."""
    ssys, tsys = build_system(scheme.source), build_system(scheme.target)
    sp, tp = ssys.params, tsys.params
    lhs = sum((scheme.param_subst[n] * w for n, w in zip(sp.names, sp.weights)), RatFunc.const(0))
    rhs = sum((RatFunc.var(n) * w for n, w in zip(tp.names, tp.weights)), RatFunc.const(0))
    return (lhs - sp.target).same_as(rhs - tp.target)


_OMEGA = ((0, 1, 0, 0), (-1, 0, 0, 0), (0, 0, 0, 1), (0, 0, -1, 0))


def check_symplectic(scheme: DegenerationScheme, points: int = 10, rng: random.Random | None = None,
                     bound: int = 10**6) -> bool:
    """J^T Omega J == Omega for the variable substitution, at random points with eps != 0."""
    rng = rng or random.Random(0)
    ssys, tsys = build_system(scheme.source), build_system(scheme.target)
    jac_exprs = [[scheme.var_subst[v].diff(V) for V in tsys.phase] for v in ssys.phase]

    def body(p):
        q = dict(p)
        if scheme.has_eps:
            q[EPS] = random_rational(rng, bound)
        J = [[e.evaluate(q) for e in row] for row in jac_exprs]
        return all(
            sum(J[k][i] * _OMEGA[k][l] * J[l][j] for k in range(4) for l in range(4)) == _OMEGA[i][j]
            for i in range(4) for j in range(4)
        )

    return _run_points(rng, lambda r: _target_point(scheme, r, bound), body, points)


def check_inverse(scheme: DegenerationScheme, points: int = 10, rng: random.Random | None = None,
                  bound: int = 10**6) -> bool:
    """Target -> source -> target round trip through the stored inverse formulas."""
    rng = rng or random.Random(0)

    def body(p):
        q = dict(p)
        if scheme.has_eps:
            q[EPS] = random_rational(rng, bound)
        src = _source_point(scheme, _Lift(q, None))
        if scheme.has_eps:
            src[EPS] = q[EPS]
        back = {k: e.evaluate(src) for k, e in scheme.inverse_param.items()}
        back.update({k: e.evaluate(src) for k, e in scheme.inverse_var.items()})
        return all(back[k] == q[k] for k in back)

    return _run_points(rng, lambda r: _target_point(scheme, r, bound), body, points)


# ---------------------------------------------------------------------------
# subgroup limits

@dataclass
class SubgroupResult:
    scheme: str
    target_gen: str
    source_word: str
    limit_ok: bool
    consistent: bool
    printed_ok: bool | None = None
    printed_exact: bool | None = None

    @property
    def holds(self) -> bool:
        return (self.limit_ok and self.consistent
                and self.printed_ok is not False and self.printed_exact is not False)


def conjugated_action(scheme: DegenerationScheme, entry: SubgroupEntry, point: Mapping[str, Any],
                      order: int | None):
    """The source word seen in target coordinates at one target point.

    Returns the images of the target variables and parameters, the image of
    eps, and the residual of the forward parameter substitution at the image
    (zero when the eps action in the table is consistent with the word).
    With ``order`` set, eps is formal and every value is an EpsSeries.
    """
    lift = _Lift(point, order)
    src = _source_point(scheme, lift)
    moved = parse_word(scheme.source, entry.source_word).apply(src)
    eps_new = None
    if scheme.has_eps:
        if isinstance(entry.eps_image, Binomial) and order is None:
            raise ValueError("an irrational eps action needs formal eps")
        eps_new = lift.value(entry.eps_image)
        moved[EPS] = eps_new
    out = {k: e.evaluate(moved) for k, e in scheme.inverse_param.items()}
    out.update({k: e.evaluate(moved) for k, e in scheme.inverse_var.items()})
    back = dict(out)
    if scheme.has_eps:
        back[EPS] = eps_new
    residual = [e.evaluate(back) - moved[k] for k, e in scheme.param_subst.items()]
    return out, eps_new, residual


def _series_zero(s, order: int) -> bool:
    return not s.truncate(min(order, s.order))


def check_subgroup_entry(scheme: DegenerationScheme, entry: SubgroupEntry, points: int = 10,
                         order: int = DEFAULT_ORDER, rng: random.Random | None = None,
                         bound: int = 10**6) -> SubgroupResult:
    """Limit of one conjugated source word against the target generator."""
    rng = rng or random.Random(0)
    tsys = build_system(scheme.target)
    target = generator(scheme.target, entry.target_gen)
    keys = tsys.variables + tsys.params.names
    flags = {"limit": True, "consistent": True, "printed": True if entry.printed else None}

    def body(p):
        expected = target.apply(p)
        if not scheme.has_eps:
            out, _, residual = conjugated_action(scheme, entry, p, None)
            flags["consistent"] &= all(r == 0 for r in residual)
            flags["limit"] &= all(out[k] == expected[k] for k in keys)
            return True

        def attempt(work):
            out, _, residual = conjugated_action(scheme, entry, p, work)
            if any(out[k].order < order for k in keys):
                raise PrecisionError("result order below request")
            return out, residual

        out, residual = _with_precision(attempt, order)
        flags["consistent"] &= all(_series_zero(r, order) for r in residual)
        for k in keys:
            s = out[k].truncate(order)
            if s.min_degree < 0 or s.coeff(0) != expected[k]:
                flags["limit"] = False
        for k, e in entry.printed_limit.items():
            if out[k].truncate(order).coeff(0) != e.evaluate(p):
                flags["limit"] = False
        if entry.printed:
            lift = _Lift(p, order + 8)
            flags["printed"] &= all(
                _series_zero(out[k] - lift.value(e), order) for k, e in entry.printed.items()
            )
        return True

    _run_points(rng, lambda r: _target_point(scheme, r, bound), body, points)
    exact = None
    if scheme.has_eps and entry.printed and entry.rational_eps:
        exact = _printed_exact(scheme, entry, points, rng, bound)
    return SubgroupResult(scheme.name, entry.target_gen, entry.source_word,
                          flags["limit"], flags["consistent"], flags["printed"], exact)


def _printed_exact(scheme: DegenerationScheme, entry: SubgroupEntry, points: int,
                   rng: random.Random, bound: int) -> bool:
    """Printed finite-eps images as exact identities at numeric eps."""

    def body(p):
        q = dict(p)
        q[EPS] = random_rational(rng, bound)
        out, _, residual = conjugated_action(scheme, entry, q, None)
        return all(r == 0 for r in residual) and all(
            out[k] == e.evaluate(q) for k, e in entry.printed.items())

    return _run_points(rng, lambda r: _target_point(scheme, r, bound), body, points)


def check_subgroup_limit(scheme: DegenerationScheme, points: int = 10, order: int = DEFAULT_ORDER,
                         rng: random.Random | None = None) -> bool:
    rng = rng or random.Random(0)
    return all(check_subgroup_entry(scheme, e, points, order, rng).holds for e in scheme.subgroup)
