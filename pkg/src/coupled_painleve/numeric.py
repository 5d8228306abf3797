"""Floating-point integration of the cataloged systems and dynamical cross-checks."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import DOP853

from .polys import RatFunc, compile_float
from .systems import HamiltonianSystem, InvariantDivisor, build_HIII, build_HV
from .weyl import BirationalMap

DEFAULT_GUARD = 1e-6
DEFAULT_REL_TOL = 1e-10
CONSTRAINT_TOL = 1e-14


class IntegrationError(RuntimeError):
    """The numeric path could not be completed."""


class SingularityApproach(IntegrationError):
    """A trajectory or a map came within the guard distance of a denominator locus."""

    def __init__(self, message: str, t: float | None = None, state: Sequence[float] | None = None):
        self.t = None if t is None else float(t)
        self.state = None if state is None else tuple(float(v) for v in state)
        super().__init__(message if t is None else f"{message} at t={self.t!r}, state={list(self.state or ())}")


class StepUnderflow(IntegrationError):
    pass


class ConditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class FloatState:
    values: tuple[float, float, float, float]
    t: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (*self.values, self.t)):
            raise ValueError("non-finite state")


@dataclass
class Trajectory:
    times: list[float]
    states: list[tuple[float, ...]]
    steps: int = 0
    evaluations: int = 0
    min_margin: float = math.inf

    @property
    def final(self) -> FloatState:
        return FloatState(tuple(self.states[-1]), self.times[-1])

    def component(self, i: int) -> np.ndarray:
        return np.array([s[i] for s in self.states])


def float_params(sys: HamiltonianSystem, exact: Mapping[str, Fraction]) -> dict[str, float]:
    """Float parameters from exact ones; the constraint is asserted, never repaired."""
    ps = sys.params
    if ps.functional(exact) != ps.target:
        raise ValueError(f"parameters violate {ps.describe()}")
    floats = {n: float(exact[n]) for n in ps.names}
    residual = abs(sum(w * floats[n] for n, w in zip(ps.names, ps.weights)) - float(ps.target))
    if residual > CONSTRAINT_TOL:
        raise ValueError(f"float constraint residual {residual:.3e} exceeds {CONSTRAINT_TOL}")
    return floats


class CompiledField:
    """The vector field with parameters bound, compiled to float code."""

    def __init__(self, sys: HamiltonianSystem, params: Mapping[str, Fraction]):
        self.sys = sys
        self.params = dict(params)
        float_params(sys, params)
        bound = [f.partial_substitute(self.params) for f in sys.vector_field()]
        args = sys.variables
        self.rhs = compile_float(bound, args)
        dens = []
        for f in bound:
            if not f.den.is_constant() and not any(f.den == d for d in dens):
                dens.append(f.den)
        self.guards = compile_float([RatFunc(d) for d in dens], args) if dens else None
        self.time_singular = any(sys.time in d.variables() for d in dens)

    def __call__(self, t: float, y) -> np.ndarray:
        return np.array(self.rhs(*y, t))

    def margin(self, t: float, y) -> float:
        if self.guards is None:
            return math.inf
        return min(abs(v) for v in self.guards(*y, t))


def integrate(sys: HamiltonianSystem, params: Mapping[str, Fraction], initial: FloatState, t1: float,
              rel_tol: float = DEFAULT_REL_TOL, samples: Sequence[float] | None = None,
              guard: float = DEFAULT_GUARD, abs_tol: float | None = None,
              max_steps: int = 200_000) -> Trajectory:
    """Adaptive integration from initial.t to t1, reported at the sample times.

    Sample times default to the two endpoints.  The guard is checked at every
    accepted step against the denominators of the field.
    """
    t0 = initial.t
    fld = CompiledField(sys, params)
    if t1 != t0 and fld.time_singular and t0 * t1 <= 0:
        raise ValueError("the time interval must not reach t = 0")
    y0 = np.array(initial.values, dtype=float)
    margin = fld.margin(t0, y0)
    if margin < guard:
        raise SingularityApproach("initial state inside the guard", t0, y0)
    times = sorted(set(samples or ()) | {t0, t1}, reverse=t1 < t0)
    if any((s - t0) * (t1 - s) < 0 for s in times):
        raise ValueError("sample times outside the integration interval")
    if t1 == t0:
        return Trajectory([t0], [tuple(map(float, y0))], 0, 0, margin)

    solver = DOP853(fld, t0, y0, t1, rtol=rel_tol, atol=rel_tol if abs_tol is None else abs_tol)
    out_t, out_y = [t0], [tuple(map(float, y0))]
    pending = iter(times[1:])
    nxt = next(pending, None)
    steps = 0
    direction = 1.0 if t1 > t0 else -1.0
    while nxt is not None:
        msg = solver.step()
        if solver.status == "failed":
            raise StepUnderflow(f"{msg} near t={solver.t!r}")
        steps += 1
        if steps > max_steps:
            raise StepUnderflow(f"more than {max_steps} steps")
        y = solver.y
        if not np.all(np.isfinite(y)):
            raise SingularityApproach("state overflow", solver.t, y)
        margin = min(margin, fld.margin(solver.t, y))
        if margin < guard:
            raise SingularityApproach("denominator within guard", solver.t, y)
        dense = None
        while nxt is not None and direction * (nxt - solver.t) <= 0:
            if nxt == solver.t:
                val = y
            else:
                dense = dense or solver.dense_output()
                val = dense(nxt)
            out_t.append(nxt)
            out_y.append(tuple(float(v) for v in val))
            nxt = next(pending, None)
    return Trajectory(out_t, out_y, steps, solver.nfev, margin)


# ---------------------------------------------------------------------------
# maps on floating points

def apply_float(m: BirationalMap, state: FloatState, params: Mapping[str, Fraction],
                guard: float = DEFAULT_GUARD) -> tuple[FloatState, dict[str, Fraction]]:
    """Image of a float state; parameters stay exact."""
    sys = m.sys()
    cur: dict = dict(zip(sys.phase, state.values))
    cur[sys.time] = state.t
    cur.update(params)
    for g in m.letters:
        new = dict(cur)
        for v, img in g.images.items():
            d = img.den.evaluate(cur)
            if abs(d) < guard:
                raise SingularityApproach(f"denominator of {g.name} within guard", state.t, state.values)
            new[v] = float(img.num.evaluate(cur)) / float(d)
        for v, img in g.param_images.items():
            new[v] = img.evaluate(cur)
        cur = new
    image = FloatState(tuple(float(cur[v]) for v in sys.phase), float(cur[sys.time]))
    return image, {n: cur[n] for n in sys.params.names}


def flow_commutation_error(m: BirationalMap, sys: HamiltonianSystem, params: Mapping[str, Fraction],
                           initial: FloatState, t1: float, rel_tol: float = DEFAULT_REL_TOL,
                           guard: float = DEFAULT_GUARD) -> float:
    """max |m(flow(initial)) - flow'(m(initial))| over the phase components.

    The second flow runs under the transformed parameters, from the image of
    the start time to the image of t1 (so time-reversing maps integrate the
    mirrored interval).
    """
    end = integrate(sys, params, initial, t1, rel_tol, guard=guard).final
    mapped_end, _ = apply_float(m, end, params, guard)
    start, new_params = apply_float(m, initial, params, guard)
    other = integrate(sys, new_params, start, mapped_end.t, rel_tol, guard=guard).final
    return max(abs(a - b) for a, b in zip(mapped_end.values, other.values))


# ---------------------------------------------------------------------------
# sampling helpers for numeric experiments

def default_window(sys: HamiltonianSystem) -> tuple[float, float]:
    return (0.0, 1.0) if sys.name == "A4" else (1.0, 2.0)


def small_params(sys: HamiltonianSystem, rng: random.Random,
                 fixed: Mapping[str, Fraction] | None = None) -> dict[str, Fraction]:
    """Parameters on the constraint plane with small denominators (exact)."""
    fixed = dict(fixed or {})
    ps = sys.params
    free = ps.solve_for(fixed)
    weight = dict(zip(ps.names, ps.weights))
    while True:
        # unfixed parameters are kept nonzero so that no generator degenerates
        vals = {n: Fraction(fixed[n]) if n in fixed else Fraction(rng.choice(_NONZERO), 8)
                for n in ps.names if n != free}
        rest = sum(weight[n] * v for n, v in vals.items())
        vals[free] = (ps.target - rest) / weight[free]
        if vals[free] != 0:
            return {n: vals[n] for n in ps.names}


_NONZERO = [k for k in range(-8, 9) if k]


def generic_start(sys: HamiltonianSystem, rng: random.Random, t0: float,
                  low: float = 0.2, high: float = 0.8) -> FloatState:
    signs = [rng.choice((-1, 1)) for _ in sys.phase]
    return FloatState(tuple(s * rng.uniform(low, high) for s in signs), t0)


def flow_commutation_cases(m: BirationalMap, count: int, rng: random.Random,
                           rel_tol: float = DEFAULT_REL_TOL, max_tries: int = 50) -> list[float]:
    """Commutation errors at ``count`` generic starts on the default window.

    Draws whose trajectories run into a pole or a guard are redrawn.
    """
    sys = m.sys()
    t0, t1 = default_window(sys)
    errors: list[float] = []
    tries = 0
    while len(errors) < count:
        tries += 1
        if tries > max_tries:
            raise IntegrationError(f"no regular start found for {m.name} in {max_tries} draws")
        params = small_params(sys, rng)
        start = generic_start(sys, rng, t0)
        try:
            errors.append(flow_commutation_error(m, sys, params, start, t1, rel_tol))
        except IntegrationError:
            continue
    return errors


def divisor_start(sys: HamiltonianSystem, d: InvariantDivisor, params: Mapping[str, Fraction],
                  rng: random.Random, t0: float) -> FloatState:
    """A generic float point on the surface f = 0 (f is linear in some phase variable)."""
    for v in sys.phase:
        num = d.f.num
        if d.f.den.is_constant() and num.degree_in(v) == 1:
            coeffs = num.coefficients_in(v)
            a, b = RatFunc(coeffs.get(1)), RatFunc(coeffs[0]) if 0 in coeffs else RatFunc.const(0)
            break
    else:
        raise ValueError(f"cannot solve {d.f.to_text()} = 0 for a phase variable")
    while True:
        base = generic_start(sys, rng, t0)
        point: dict = dict(zip(sys.phase, base.values))
        point[sys.time] = t0
        point.update(params)
        av = float(a.evaluate(point))
        if abs(av) < 1e-3:
            continue
        point[v] = -float(b.evaluate(point)) / av
        return FloatState(tuple(float(point[u]) for u in sys.phase), t0)


def divisor_drift(sys: HamiltonianSystem, d: InvariantDivisor, params: Mapping[str, Fraction],
                  initial: FloatState, t1: float, rel_tol: float = DEFAULT_REL_TOL,
                  samples: int = 21) -> float:
    """max |f| along the trajectory started on f = 0."""
    if params[d.condition] != d.value:
        raise ConditionViolated(f"{d.condition} must equal {d.value}")
    grid = np.linspace(initial.t, t1, samples).tolist()
    traj = integrate(sys, params, initial, t1, rel_tol, samples=grid)
    f = compile_float([d.f.partial_substitute(params)], sys.variables)
    return max(abs(f(*s, t)[0]) for t, s in zip(traj.times, traj.states))


# ---------------------------------------------------------------------------
# Riccati-type reductions

def reduced_system(sys: HamiltonianSystem) -> tuple[str, RatFunc]:
    """Which parameter vanishes, and the standalone (z, w) Hamiltonian once y = 0."""
    if sys.name == "D5":
        return "a1", build_HV("z", "w", "t", RatFunc.var("a5"), RatFunc.var("a3"), RatFunc.var("a4"))
    if sys.name == "B4":
        g0 = RatFunc.var("a0") + RatFunc.var("a1") + 2 * RatFunc.var("a2") + RatFunc.var("a3")
        return "a1", build_HIII("z", "w", "t", g0, RatFunc.var("a3"))
    raise KeyError(f"no reduction for {sys.name}")


def riccati_residual(sys: HamiltonianSystem, params: Mapping[str, Fraction], trajectory: Trajectory,
                     tol: float = 1e-12) -> float:
    """max |d(z,w)/dt - standalone field| along a trajectory with y == 0."""
    cond, H = reduced_system(sys)
    if params[cond] != 0:
        raise ConditionViolated(f"{cond} must vanish")
    if abs(trajectory.states[0][1]) > tol:
        raise ConditionViolated("the trajectory must start on y = 0")
    reduced = [H.diff("w"), -H.diff("z")]
    f_red = compile_float([r.partial_substitute(params) for r in reduced], ("z", "w", "t"))
    f_full = CompiledField(sys, params)
    worst = 0.0
    for t, s in zip(trajectory.times, trajectory.states):
        full = f_full(t, s)
        red = f_red(s[2], s[3], t)
        worst = max(worst, abs(full[2] - red[0]), abs(full[3] - red[1]))
    return worst


# ---------------------------------------------------------------------------
# energy identity dH/dt = dH/dt|explicit along solutions

def energy_defect(sys: HamiltonianSystem, params: Mapping[str, Fraction], initial: FloatState,
                  t1: float, rel_tol: float = 1e-12, centers: int = 5, h: float = 1e-3) -> float:
    """Largest relative gap between a finite-difference dH/dt and the explicit time derivative."""
    H = sys.hamiltonian.partial_substitute(params)
    Hf = compile_float([H], sys.variables)
    Ht = compile_float([H.diff(sys.time)], sys.variables)
    t0 = initial.t
    span = t1 - t0
    mids = [t0 + span * (k + 1) / (centers + 1) for k in range(centers)]
    offsets = (-2, -1, 1, 2)
    grid = sorted({m + o * h for m in mids for o in offsets} | set(mids), reverse=span < 0)
    traj = integrate(sys, params, initial, t1, rel_tol, samples=grid)
    at = {t: s for t, s in zip(traj.times, traj.states)}
    worst = 0.0
    for m in mids:
        e = {o: Hf(*at[m + o * h], m + o * h)[0] for o in offsets}
        fd = (e[-2] - 8 * e[-1] + 8 * e[1] - e[2]) / (12 * h)
        exact = Ht(*at[m], m)[0]
        worst = max(worst, abs(fd - exact) / max(1.0, abs(exact)))
    return worst


# ---------------------------------------------------------------------------

def export_csv(trajectory: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "y", "z", "w"])
        for t, s in zip(trajectory.times, trajectory.states):
            writer.writerow([repr(float(t)), *(repr(float(v)) for v in s)])
    return path


def sample_grid(t0: float, t1: float, n: int = 11) -> list[float]:
    return np.linspace(t0, t1, n).tolist()
