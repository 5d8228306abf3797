"""Backlund transformations as birational maps with affine parameter actions.

Words follow the usual automorphism convention: the product ``g1 g2`` acts on
expressions as ``g1(g2(f))``, which on points means *apply g1 first, then g2*.
Long words are kept as words and only ever evaluated, never expanded.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping, Sequence

from .polys import RatFunc, parse
from .sampling import Indeterminate, MAX_RESAMPLES
from .polys import UnluckyPoint
from .systems import HamiltonianSystem, ParamSpace, build_system


# ---------------------------------------------------------------------------
# affine parameter maps

@dataclass(frozen=True)
class ParamMap:
    """alpha -> matrix @ alpha + shift on an ordered parameter vector."""

    names: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    shift: tuple[Fraction, ...]

    @classmethod
    def identity(cls, names: Sequence[str]) -> "ParamMap":
        n = len(names)
        return cls(tuple(names),
                   tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)),
                   (Fraction(0),) * n)

    @classmethod
    def from_images(cls, names: Sequence[str], images: Mapping[str, RatFunc]) -> "ParamMap":
        rows, shift = [], []
        for n in names:
            img = images.get(n, RatFunc.var(n))
            if not img.is_polynomial() or img.num.total_degree() > 1:
                raise ValueError(f"parameter image of {n} is not affine")
            stray = img.variables() - set(names)
            if stray:
                raise ValueError(f"parameter image of {n} involves {sorted(stray)}")
            p = img.num.scale(1 / img.den.constant_value())
            rows.append(tuple(p.diff(m).constant_value() if p.diff(m).terms else Fraction(0)
                              for m in names))
            zero = {m: Fraction(0) for m in names}
            shift.append(p.evaluate(zero))
        return cls(tuple(names), tuple(rows), tuple(shift))

    def apply(self, values: Sequence) -> tuple:
        return tuple(
            sum((c * v for c, v in zip(row, values) if c), s)
            for row, s in zip(self.matrix, self.shift)
        )

    def then(self, other: "ParamMap") -> "ParamMap":
        """Point action: self first, then other."""
        n = len(self.names)
        A, B = other.matrix, self.matrix
        mat = tuple(
            tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        shift = tuple(
            sum(A[i][k] * self.shift[k] for k in range(n)) + other.shift[i] for i in range(n)
        )
        return ParamMap(self.names, mat, shift)

    def is_linear_identity(self) -> bool:
        return all(self.matrix[i][j] == (1 if i == j else 0)
                   for i in range(len(self.names)) for j in range(len(self.names)))

    def preserves(self, space: ParamSpace) -> bool:
        """Exact check that the constraint functional is invariant."""
        w = space.weights
        n = len(w)
        # w^T M == w^T and w^T s == 0 keep sum(w*alpha) fixed for every alpha
        wm = [sum(w[i] * self.matrix[i][j] for i in range(n)) for j in range(n)]
        return wm == list(map(Fraction, w)) and sum(wi * si for wi, si in zip(w, self.shift)) == 0


# ---------------------------------------------------------------------------
# birational maps

@dataclass(eq=False)
class BirationalMap:
    """A generator (explicit images) or a word in generators."""

    name: str
    system: str
    images: dict[str, RatFunc] = field(default_factory=dict)
    param_images: dict[str, RatFunc] = field(default_factory=dict)
    word: tuple["BirationalMap", ...] = ()

    @property
    def is_word(self) -> bool:
        return bool(self.word)

    @property
    def letters(self) -> tuple["BirationalMap", ...]:
        return self.word if self.word else (self,)

    def sys(self) -> HamiltonianSystem:
        return build_system(self.system)

    def image(self, v: str) -> RatFunc:
        if self.is_word:
            raise ValueError("images of words are not expanded; use expand()")
        if v in self.images:
            return self.images[v]
        if v in self.param_images:
            return self.param_images[v]
        return RatFunc.var(v)

    @property
    def param_map(self) -> ParamMap:
        names = self.sys().params.names
        pm = ParamMap.identity(names)
        for g in self.letters:
            pm = pm.then(ParamMap.from_images(names, g.param_images))
        return pm

    @property
    def time_action(self) -> str:
        """'identity', 'reversal' or 'general' (from the composed t-image)."""
        sign = 1
        t = self.sys().time
        for g in self.letters:
            img = g.images.get(t, RatFunc.var(t))
            if img.same_as(RatFunc.var(t)):
                continue
            if img.same_as(-RatFunc.var(t)):
                sign = -sign
                continue
            return "general"
        return "identity" if sign == 1 else "reversal"

    # evaluation ---------------------------------------------------------
    def apply(self, point: Mapping[str, Any]) -> dict[str, Any]:
        """Image of a point (phase vars, time and parameters)."""
        cur = dict(point)
        for g in self.letters:
            new = dict(cur)
            for v, img in g.images.items():
                new[v] = img.evaluate(cur)
            for v, img in g.param_images.items():
                new[v] = img.evaluate(cur)
            cur = new
        return cur

    def _jacobian(self):
        if not hasattr(self, "_jac"):
            s = self.sys()
            vs = s.variables
            self._jac = {
                v: {u: img.diff(u) for u in vs if u in img.variables()}
                for v, img in self.images.items()
            }
        return self._jac

    def push(self, point: Mapping[str, Any], tangent: Mapping[str, Any]):
        """Push a point and a tangent vector (in phase vars and time) forward."""
        cur, vel = dict(point), dict(tangent)
        for g in self.letters:
            jac = g._jacobian()
            new_vel = dict(vel)
            for v, parts in jac.items():
                acc = 0
                for u, d in parts.items():
                    acc = acc + d.evaluate(cur) * vel[u]
                new_vel[v] = acc
            new = dict(cur)
            for v, img in g.images.items():
                new[v] = img.evaluate(cur)
            for v, img in g.param_images.items():
                new[v] = img.evaluate(cur)
            cur, vel = new, new_vel
        return cur, vel

    def expand(self) -> "BirationalMap":
        """Symbolic composition (only sensible for short words)."""
        if not self.is_word:
            return self
        s = self.sys()
        names = s.variables + s.params.names
        current = {v: RatFunc.var(v) for v in names}
        for g in self.word:
            # point map: apply current, then g  ->  g's images with current substituted
            current = {v: g.image(v).substitute(current) for v in names}
        images = {v: current[v] for v in s.variables if not current[v].same_as(RatFunc.var(v))}
        params = {v: current[v] for v in s.params.names if not current[v].same_as(RatFunc.var(v))}
        return BirationalMap(self.name, self.system, images, params)

    def with_params(self, param_images: Mapping[str, RatFunc], name: str | None = None) -> "BirationalMap":
        """Copy with a replaced parameter action (used for negative controls)."""
        if self.is_word:
            raise ValueError("only generators can be modified")
        return BirationalMap(name or self.name + "'", self.system, dict(self.images), dict(param_images))

    def __repr__(self) -> str:
        return f"BirationalMap({self.system}:{self.name})"


def _gen(system: str, name: str, images: Mapping[str, str], params: Sequence[str]) -> BirationalMap:
    s = build_system(system)
    imgs = {v: parse(e) for v, e in images.items()}
    pimgs = {}
    for p, e in zip(s.params.names, params):
        r = parse(e)
        if not r.same_as(RatFunc.var(p)):
            pimgs[p] = r
    if len(params) != len(s.params.names):
        raise ValueError(f"{system} {name}: wrong number of parameter images")
    return BirationalMap(name, system, imgs, pimgs)


def _catalog_d5():
    return [
        _gen("D5", "s0", {"x": "x + a0/(y+t)"}, ["-a0", "a1", "a2+a0", "a3", "a4", "a5"]),
        _gen("D5", "s1", {"x": "x + a1/y"}, ["a0", "-a1", "a2+a1", "a3", "a4", "a5"]),
        _gen("D5", "s2", {"y": "y - a2/(x-z)", "w": "w + a2/(x-z)"},
             ["a0+a2", "a1+a2", "-a2", "a3+a2", "a4", "a5"]),
        _gen("D5", "s3", {"z": "z + a3/w"}, ["a0", "a1", "a2+a3", "-a3", "a4+a3", "a5+a3"]),
        _gen("D5", "s4", {"w": "w - a4/(z-1)"}, ["a0", "a1", "a2", "a3+a4", "-a4", "a5"]),
        _gen("D5", "s5", {"w": "w - a5/z"}, ["a0", "a1", "a2", "a3+a5", "a4", "-a5"]),
        _gen("D5", "pi1", {"x": "1-x", "y": "-y-t", "z": "1-z", "w": "-w"},
             ["a1", "a0", "a2", "a3", "a5", "a4"]),
        _gen("D5", "pi2", {"x": "(y+w+t)/t", "y": "-t*(z-1)", "z": "(y+t)/t", "w": "-t*(x-z)", "t": "-t"},
             ["a5", "a4", "a3", "a2", "a1", "a0"]),
        _gen("D5", "pi3", {"x": "1-x", "y": "-y", "z": "1-z", "w": "-w", "t": "-t"},
             ["a0", "a1", "a2", "a3", "a5", "a4"]),
        _gen("D5", "pi4", {"y": "y+t", "t": "-t"}, ["a1", "a0", "a2", "a3", "a4", "a5"]),
    ]


def _catalog_b4():
    return [
        _gen("B4", "s0", {"x": "x + a0/(y-1)"}, ["-a0", "a1", "a2+a0", "a3", "a4"]),
        _gen("B4", "s1", {"x": "x + a1/y"}, ["a0", "-a1", "a2+a1", "a3", "a4"]),
        _gen("B4", "s2", {"y": "y - a2/(x-z)", "w": "w + a2/(x-z)"},
             ["a0+a2", "a1+a2", "-a2", "a3+a2", "a4"]),
        _gen("B4", "s3", {"z": "z + a3/w"}, ["a0", "a1", "a2+a3", "-a3", "a4+a3"]),
        _gen("B4", "s4", {"w": "w - 2*a4/z + t/z**2", "t": "-t"}, ["a0", "a1", "a2", "a3+2*a4", "-a4"]),
        _gen("B4", "pi1", {"x": "-x", "y": "1-y", "z": "-z", "w": "-w", "t": "-t"},
             ["a1", "a0", "a2", "a3", "a4"]),
        _gen("B4", "pi2", {"x": "t/z", "y": "-(z/t)*(z*w+a3)", "z": "t/x", "w": "-(x/t)*(x*y+a1)"},
             ["2*a4+a3", "a3", "a2", "a1", "(a0-a1)/2"]),
    ]


def _catalog_d4_2():
    return [
        _gen("D4_2", "w1", {"y": "y - b1/(x-z)", "w": "w + b1/(x-z)"}, ["-b1", "b2+b1", "b3", "b4+b1"]),
        _gen("D4_2", "w2", {"z": "z + b2/w"}, ["b1+b2", "-b2", "b3+b2", "b4"]),
        _gen("D4_2", "w3", {"w": "w - 2*b3/z + t/z**2", "t": "-t"}, ["b1", "b2+2*b3", "-b3", "b4"]),
        _gen("D4_2", "w4", {"x": "-x - 2*b4/y + 1/y**2", "y": "-y", "z": "-z", "w": "-w", "t": "-t"},
             ["b1+2*b4", "b2", "b3", "-b4"]),
    ]


def _catalog_b3():
    return [
        _gen("B3", "s0", {"z": "z + a0/(w-t)"}, ["-a0", "a1", "a2+a0", "a3"]),
        _gen("B3", "s1", {"z": "z + a1/w"}, ["a0", "-a1", "a2+a1", "a3"]),
        _gen("B3", "s2", {"y": "y - a2*z/(x*z-1)", "w": "w - a2*x/(x*z-1)"},
             ["a0+a2", "a1+a2", "-a2", "a3+a2"]),
        _gen("B3", "s3", {"x": "-x - 2*a3/y + 1/y**2", "y": "-y", "z": "-z", "w": "-w", "t": "-t"},
             ["a0", "a1", "a2+2*a3", "-a3"]),
        _gen("B3", "pi", {"w": "w-t", "t": "-t"}, ["a1", "a0", "a2", "a3"]),
    ]


def _catalog_a4():
    d = "(X - 2*Y - 2*W + 2*T)"
    return [
        _gen("A4", "s0", {"X": f"X - 2*A0/{d}", "Y": f"Y - A0/{d}", "Z": f"Z - 2*A0/{d}"},
             ["-A0", "A1+A0", "A2", "A3", "A4+A0"]),
        _gen("A4", "s1", {"X": "X + A1/Y"}, ["A0+A1", "-A1", "A2+A1", "A3", "A4"]),
        _gen("A4", "s2", {"Y": "Y - A2/(X-Z)", "W": "W + A2/(X-Z)"}, ["A0", "A1+A2", "-A2", "A3+A2", "A4"]),
        _gen("A4", "s3", {"Z": "Z + A3/W"}, ["A0", "A1", "A2+A3", "-A3", "A4+A3"]),
        _gen("A4", "s4", {"W": "W - A4/Z"}, ["A0+A4", "A1", "A2", "A3+A4", "-A4"]),
    ]


_CATALOGS = {"D5": _catalog_d5, "B4": _catalog_b4, "D4_2": _catalog_d4_2, "B3": _catalog_b3, "A4": _catalog_a4}


@lru_cache(maxsize=None)
def generators(system_name: str) -> dict[str, BirationalMap]:
    try:
        maps = _CATALOGS[system_name]()
    except KeyError:
        raise KeyError(f"unknown system {system_name!r}") from None
    return {m.name: m for m in maps}


def generator(system_name: str, gen_id: str) -> BirationalMap:
    gens = generators(system_name)
    if gen_id not in gens:
        raise KeyError(f"{system_name} has no generator {gen_id!r}; known: {sorted(gens)}")
    return gens[gen_id]


def compose(m1: BirationalMap, m2: BirationalMap, name: str | None = None) -> BirationalMap:
    """The product m1 m2 (points: m1 first, then m2), kept as a word."""
    if m1.system != m2.system:
        raise ValueError("cannot compose maps of different systems")
    return BirationalMap(name or f"{m1.name} {m2.name}", m1.system, word=m1.letters + m2.letters)


def parse_word(system_name: str, text: str, name: str | None = None) -> BirationalMap:
    """Word from whitespace separated generator names, e.g. ``"s2 s3 s2"``."""
    letters = tuple(generator(system_name, g) for g in text.split())
    if not letters:
        raise ValueError("empty word")
    return BirationalMap(name or text, system_name, word=letters)


def format_word(m: BirationalMap) -> str:
    return " ".join(g.name for g in m.letters)


def power(m: BirationalMap, n: int) -> BirationalMap:
    return BirationalMap(f"({m.name})^{n}", m.system, word=m.letters * n)


# ---------------------------------------------------------------------------
# identity testing

def _sample(sys: HamiltonianSystem, rng: random.Random) -> dict[str, Fraction]:
    return sys.sample_point(rng)


def is_identity(m: BirationalMap, points: int = 10, rng: random.Random | None = None,
                seed: int = 0) -> bool:
    """Exact check that m fixes phase variables, time and parameters at sampled points.

    Raises Indeterminate when the resampling budget is exhausted.
    """
    rng = rng or random.Random(seed)
    sys = m.sys()
    keys = sys.variables + sys.params.names
    good = misses = 0
    while good < points:
        p = _sample(sys, rng)
        try:
            q = m.apply(p)
        except (UnluckyPoint, ZeroDivisionError):
            misses += 1
            if misses > MAX_RESAMPLES:
                raise Indeterminate(f"{m.name}: {misses} unlucky points") from None
            continue
        if any(q[k] != p[k] for k in keys):
            return False
        good += 1
    return True


# ---------------------------------------------------------------------------
# presentations and translations

@dataclass(frozen=True)
class WeylPresentation:
    system: str
    generators: tuple[str, ...]
    relations: tuple[tuple[str, int], ...]


def _presentation(system, gens, squares, pairs2, pairs3, pairs4=(), extra=()):
    rels = [(g, 2) for g in squares]
    rels += [(p, 2) for p in pairs2]
    rels += [(p, 3) for p in pairs3]
    rels += [(p, 4) for p in pairs4]
    rels += list(extra)
    return WeylPresentation(system, tuple(gens), tuple(rels))


PRESENTATIONS = {
    "D5": _presentation(
        "D5",
        ["s0", "s1", "s2", "s3", "s4", "s5", "pi1", "pi2", "pi3", "pi4"],
        ["s0", "s1", "s2", "s3", "s4", "s5", "pi1", "pi2", "pi3", "pi4"],
        ["s0 s1", "s0 s3", "s0 s4", "s0 s5", "s1 s3", "s1 s4", "s1 s5", "s2 s4", "s2 s5", "s4 s5"],
        ["s0 s2", "s1 s2", "s2 s3", "s3 s4", "s3 s5"],
        # pi4 = pi2 pi3 pi2, i.e. pi4 pi2 pi3 pi2 = 1
        extra=[("pi4 pi2 pi3 pi2", 1)],
    ),
    "B4": _presentation(
        "B4",
        ["s0", "s1", "s2", "s3", "s4", "pi1", "pi2"],
        ["s0", "s1", "s2", "s3", "s4", "pi1", "pi2"],
        ["s0 s1", "s0 s3", "s0 s4", "s1 s3", "s1 s4", "s2 s4"],
        ["s0 s2", "s1 s2", "s2 s3"],
        ["s3 s4"],
    ),
    "D4_2": _presentation(
        "D4_2",
        ["w1", "w2", "w3", "w4"],
        ["w1", "w2", "w3", "w4"],
        ["w1 w3", "w3 w4", "w2 w4"],
        ["w1 w2"],
        ["w1 w4", "w2 w3"],
    ),
    # no relation list is printed for these two; involutions only
    "B3": _presentation("B3", ["s0", "s1", "s2", "s3", "pi"], ["s0", "s1", "s2", "s3", "pi"], [], []),
    "A4": _presentation("A4", ["s0", "s1", "s2", "s3", "s4"], ["s0", "s1", "s2", "s3", "s4"], [], []),
}


@dataclass
class RelationResult:
    system: str
    word: str
    order: int
    holds: bool | None  # None: indeterminate
    minimal: bool | None = None

    @property
    def check_id(self) -> str:
        return f"relations/{self.system}/({self.word})^{self.order}"


def verify_relation(system: str, word: str, order: int, points: int = 10,
                    rng: random.Random | None = None) -> RelationResult:
    rng = rng or random.Random(0)
    m = parse_word(system, word)
    try:
        holds = is_identity(power(m, order), points, rng)
    except Indeterminate:
        return RelationResult(system, word, order, None)
    minimal = None
    if holds:
        minimal = True
        for k in range(1, order):
            try:
                if is_identity(power(m, k), points, rng):
                    minimal = False
            except Indeterminate:
                minimal = None
    return RelationResult(system, word, order, holds, minimal)


def verify_presentation(system: str, points: int = 10, rng: random.Random | None = None) -> list[RelationResult]:
    pres = PRESENTATIONS[system]
    rng = rng or random.Random(0)
    return [verify_relation(system, w, n, points, rng) for w, n in pres.relations]


@dataclass(frozen=True)
class TranslationWord:
    system: str
    name: str
    word: str
    expected_shift: tuple[Fraction, ...] | None  # None: computed only


class NotATranslation(ValueError):
    pass


def _conj(outer: str, inner: str) -> str:
    return f"{outer} {inner} {' '.join(reversed(outer.split()))}"


def _translations():
    d5_t1 = "pi1 s5 s3 s2 s1 s0 s2 s3 s5"
    d5_t3 = _conj("s1 s4", d5_t1)
    d5_t4 = _conj("s2 s3", d5_t3)
    b4_t1 = "s4 pi1 s1 s2 s4 s3 s4 s3 s2 s1"
    b4_t2 = _conj("s0", b4_t1)
    b4_t3 = _conj("s2", b4_t2)
    F = lambda *v: tuple(Fraction(x) for x in v)
    return {
        "D5": [
            TranslationWord("D5", "T1", d5_t1, F(0, 0, 0, 0, 1, -1)),
            TranslationWord("D5", "T2", _conj("pi2", d5_t1), F(-1, 1, 0, 0, 0, 0)),
            TranslationWord("D5", "T3", d5_t3, F(0, 0, 0, 1, -1, -1)),
            TranslationWord("D5", "T4", d5_t4, F(1, 1, -1, 0, 0, 0)),
            TranslationWord("D5", "T5", _conj("s1", d5_t4), F(0, 0, 1, -1, 0, 0)),
            TranslationWord("D5", "T6", _conj("s3", d5_t3), None),
        ],
        "B4": [
            TranslationWord("B4", "T1", b4_t1, F(1, -1, 0, 0, 0)),
            TranslationWord("B4", "T2", b4_t2, F(-1, -1, 1, 0, 0)),
            TranslationWord("B4", "T3", b4_t3, F(0, 0, -1, 1, 0)),
            TranslationWord("B4", "T4", _conj("s3", b4_t3), F(0, 0, 0, -1, 1)),
        ],
        "D4_2": [
            TranslationWord("D4_2", "T1", "w1 w4 w2 w1 w2 w3 w1 w2", F(1, -1, 0, 0)),
            TranslationWord("D4_2", "T2", "w3 w1 w2 w1 w4 w1 w2 w1", F(0, -1, 1, 0)),
            TranslationWord("D4_2", "T3",
                            "w2 w1 w4 w1 w2 w1 w3 w4 w2 w1 w2 w3 w1 w4 w1 w2 w3 w2 w1 w2",
                            F(0, 0, -1, 1)),
        ],
    }


TRANSLATIONS = _translations()


def restricted_to_plane(pm: ParamMap, space: ParamSpace) -> ParamMap:
    """The affine map induced on the constraint plane, in ambient coordinates.

    Parametrize the plane as alpha = base + P beta (eliminating the first
    parameter) and write the induced map as alpha -> alpha' with
    alpha' - alpha = (M - I) P beta + (M - I) base + shift.  The returned map
    has linear part I + (M - I) P Q, where Q reads beta off alpha, and shift
    (M - I) base + shift.  It agrees with ``pm`` on the plane.
    """
    n = len(pm.names)
    free = 0
    wf = Fraction(space.weights[free])
    base = [Fraction(0)] * n
    base[free] = space.target / wf
    # alpha = base + sum_{j != free} beta_j (e_j - (w_j / w_free) e_free)
    D = [[pm.matrix[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    lin = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if j == free:
                continue
            lin[i][j] += D[i][j] - D[i][free] * space.weights[j] / wf
    shift = tuple(sum(D[i][k] * base[k] for k in range(n)) + pm.shift[i] for i in range(n))
    return ParamMap(pm.names, tuple(tuple(r) for r in lin), shift)


def translation_shift(tw: TranslationWord) -> tuple[Fraction, ...]:
    """Shift vector of a word whose action on the constraint plane is a translation."""
    word = parse_word(tw.system, tw.word, tw.name)
    pm = restricted_to_plane(word.param_map, word.sys().params)
    if not pm.is_linear_identity():
        raise NotATranslation(f"{tw.system} {tw.name}: linear part is not the identity")
    return pm.shift
