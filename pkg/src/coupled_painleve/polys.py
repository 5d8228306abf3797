"""Exact sparse multivariate polynomials and rational functions over Q.

A polynomial is a dictionary mapping exponent tuples (one entry per symbol of
the shared :class:`SymbolTable`) to nonzero ``Fraction`` coefficients.  Terms
are ordered graded-lex on the table order.

Rational functions keep numerator and denominator separately.  Normalization
only fixes the sign/rational content of the denominator and strips common
monomial factors; full gcd cancellation is opt-in (:meth:`RatFunc.cancel`).
"""

from __future__ import annotations

import ast
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Iterable, Mapping, Sequence, Union

Rational = Fraction
Exponent = tuple[int, ...]


class UnluckyPoint(ArithmeticError):
    """A denominator vanished at the requested evaluation point."""


class SymbolTable:
    """Ordered, index-stable list of variable names."""

    def __init__(self, names: Sequence[str]):
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique")
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def position(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None


# phase variables of all five systems, time, all parameter letters, eps
SYMBOLS = SymbolTable(
    ["x", "y", "z", "w", "t", "X", "Y", "Z", "W", "T"]
    + [f"a{i}" for i in range(6)]
    + [f"A{i}" for i in range(5)]
    + [f"b{i}" for i in range(1, 5)]
    + [f"g{i}" for i in range(4)]
    + ["eps"]
)
NVARS = len(SYMBOLS)
_ZERO_EXP: Exponent = (0,) * NVARS


def _grlex(e: Exponent) -> tuple[int, Exponent]:
    return (sum(e), e)


def _frac(c: Any) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


class MPoly:
    """Sparse polynomial with rational coefficients."""

    __slots__ = ("terms", "_sparse", "_hash")

    def __init__(self, terms: Mapping[Exponent, Fraction] | None = None):
        self.terms: dict[Exponent, Fraction] = {
            e: c for e, c in (terms or {}).items() if c != 0
        }
        self._sparse = None
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "MPoly":
        c = _frac(c)
        return cls({_ZERO_EXP: c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MPoly":
        e = [0] * NVARS
        e[SYMBOLS.position(name)] = power
        return cls({tuple(e): Fraction(1)})

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(e == _ZERO_EXP for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(_ZERO_EXP, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # structure ----------------------------------------------------------
    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            used.update(SYMBOLS.names[i] for i, k in enumerate(e) if k)
        return used

    def total_degree(self, names: Iterable[str] | None = None) -> int:
        if not self.terms:
            return -1
        if names is None:
            return max(sum(e) for e in self.terms)
        idx = [SYMBOLS.position(n) for n in names]
        return max(sum(e[i] for i in idx) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = SYMBOLS.position(name)
        return max((e[i] for e in self.terms), default=-1)

    def leading(self) -> tuple[Exponent, Fraction]:
        e = max(self.terms, key=_grlex)
        return e, self.terms[e]

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex(kv[0]), reverse=True)

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive over Z."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def monomial_gcd(self) -> Exponent:
        if not self.terms:
            return _ZERO_EXP
        return tuple(map(min, zip(*self.terms)))

    def coefficients_in(self, name: str) -> dict[int, "MPoly"]:
        """Split into {k: coefficient of name**k}."""
        i = SYMBOLS.position(name)
        out: dict[int, dict[Exponent, Fraction]] = {}
        for e, c in self.terms.items():
            k = e[i]
            out.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MPoly(v) for k, v in out.items()}

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            return other
        return MPoly.const(other)

    def __add__(self, other) -> "MPoly":
        if isinstance(other, RatFunc):
            return NotImplemented
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        if isinstance(other, RatFunc):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, RatFunc):
            return NotImplemented
        other = self._coerce(other)
        if len(other.terms) == 1 and _ZERO_EXP in other.terms:
            c = other.terms[_ZERO_EXP]
            return MPoly({e: c * v for e, v in self.terms.items()})
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = MPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift_down(self, mono: Exponent) -> "MPoly":
        return MPoly({tuple(a - b for a, b in zip(e, mono)): c for e, c in self.terms.items()})

    def scale(self, c) -> "MPoly":
        c = _frac(c)
        return MPoly({e: c * v for e, v in self.terms.items()})

    def diff(self, name: str) -> "MPoly":
        i = SYMBOLS.position(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return MPoly(out)

    def exact_div(self, g: "MPoly") -> "MPoly | None":
        """Quotient q with self == g*q, or None if g does not divide self."""
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lg, cg = g.leading()
        rem = dict(self.terms)
        quot: dict[Exponent, Fraction] = {}
        gterms = list(g.terms.items())
        while rem:
            m = max(rem, key=_grlex)
            if any(a < b for a, b in zip(m, lg)):
                return None
            mono = tuple(a - b for a, b in zip(m, lg))
            c = rem[m] / cg
            quot[mono] = c
            for e, v in gterms:
                key = tuple(a + b for a, b in zip(e, mono))
                nv = rem.get(key, 0) - c * v
                if nv:
                    rem[key] = nv
                else:
                    rem.pop(key, None)
        return MPoly(quot)

    # evaluation ---------------------------------------------------------
    def _sparse_terms(self):
        if self._sparse is None:
            self._sparse = [
                (c, tuple((SYMBOLS.names[i], k) for i, k in enumerate(e) if k))
                for e, c in self.terms.items()
            ]
        return self._sparse

    def evaluate(self, point: Mapping[str, Any], zero: Any = None):
        """Evaluate with values from any ring supporting + and * by Fractions.

        Unbound variables raise KeyError.  ``zero`` is returned for the zero
        polynomial (defaults to Fraction(0)).
        """
        powers: dict[tuple[str, int], Any] = {}
        total = None
        for c, factors in self._sparse_terms():
            val = None
            for name, k in factors:
                key = (name, k)
                p = powers.get(key)
                if p is None:
                    base = point[name]
                    p = base if k == 1 else _ipow(base, k)
                    powers[key] = p
                val = p if val is None else val * p
            term = c if val is None else (val * c if c != 1 else val)
            total = term if total is None else total + term
        if total is None:
            return Fraction(0) if zero is None else zero
        return total

    def partial_substitute(self, values: Mapping[str, Fraction]) -> "MPoly":
        """Bind some variables to exact numbers; the rest stay symbolic."""
        idx = {SYMBOLS.position(n): _frac(v) for n, v in values.items()}
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in idx.items():
                if e[i]:
                    c = c * v ** e[i]
                    ne[i] = 0
            if c:
                ke = tuple(ne)
                out[ke] = out.get(ke, 0) + c
        return MPoly(out)

    # text ---------------------------------------------------------------
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                SYMBOLS.names[i] + (f"**{k}" if k > 1 else "")
                for i, k in enumerate(e) if k
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"MPoly({self.to_text()})"


def _ipow(base, k: int):
    result = base
    for _ in range(k - 1):
        result = result * base
    return result


def _monomial_min(a: Exponent, b: Exponent) -> Exponent:
    return tuple(map(min, a, b))


class RatFunc:
    """Quotient of two MPoly with a normalized denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, normalize: bool = True):
        num = num if isinstance(num, MPoly) else MPoly.const(num)
        den = MPoly.const(1) if den is None else (den if isinstance(den, MPoly) else MPoly.const(den))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def var(cls, name: str) -> "RatFunc":
        return cls(MPoly.var(name), normalize=False)

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(MPoly.const(c), normalize=False)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def same_as(self, other) -> bool:
        """Exact symbolic equality by cross multiplication."""
        other = _to_rf(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MPoly, RatFunc)):
            return self.same_as(other)
        return NotImplemented

    __hash__ = None

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "RatFunc":
        other = _to_rf(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        if other.den.is_constant():
            return RatFunc(self.num + other.num * self.den, self.den)
        if self.den.is_constant():
            return RatFunc(self.num * other.den + other.num, other.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, normalize=False)

    def __sub__(self, other) -> "RatFunc":
        return self + (-_to_rf(other))

    def __rsub__(self, other) -> "RatFunc":
        return _to_rf(other) - self

    def __mul__(self, other) -> "RatFunc":
        other = _to_rf(other)
        if self.den == other.num and not other.num.is_constant():
            return RatFunc(self.num, other.den)
        if other.den == self.num and not self.num.is_constant():
            return RatFunc(other.num, self.den)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other) -> "RatFunc":
        return self * _to_rf(other).inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return _to_rf(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if not isinstance(n, int):
            raise TypeError("RatFunc powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    # calculus / substitution --------------------------------------------
    def diff(self, name: str) -> "RatFunc":
        SYMBOLS.position(name)
        dn = self.num.diff(name)
        dd = self.den.diff(name)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Mapping[str, Any]):
        """Exact value at a point; raises UnluckyPoint when the denominator vanishes.

        Values may be Fractions or any field-like objects (e.g. EpsSeries);
        for non-numeric values the vanishing test is delegated to ``bool()``.
        """
        d = self.den.evaluate(point)
        if not d:
            raise UnluckyPoint("denominator vanishes at point")
        n = self.num.evaluate(point)
        if isinstance(d, Fraction) and isinstance(n, Fraction):
            return n / d
        if isinstance(d, Fraction):
            return n * (1 / d)
        return n / d

    def substitute(self, bindings: Mapping[str, Any]) -> "RatFunc":
        """Simultaneous substitution of variables by rational functions/numbers."""
        for name in bindings:
            SYMBOLS.position(name)
        point: dict[str, RatFunc] = {}
        for name in self.variables():
            if name in bindings:
                point[name] = _to_rf(bindings[name])
            else:
                point[name] = RatFunc.var(name)
        n = self.num.evaluate(point, zero=RatFunc.const(0))
        d = self.den.evaluate(point, zero=RatFunc.const(0))
        n, d = _to_rf(n), _to_rf(d)
        if d.is_zero():
            raise ZeroDivisionError("denominator vanishes identically after substitution")
        return n / d

    def partial_substitute(self, values: Mapping[str, Fraction]) -> "RatFunc":
        d = self.den.partial_substitute(values)
        if d.is_zero():
            raise UnluckyPoint("denominator vanishes identically after substitution")
        return RatFunc(self.num.partial_substitute(values), d)

    def cancel(self) -> "RatFunc":
        """Full gcd cancellation (slow path, via sympy)."""
        import sympy

        gens = sympy.symbols(SYMBOLS.names)
        expr = sympy.cancel(_to_sympy(self.num, gens) / _to_sympy(self.den, gens))
        n, d = sympy.fraction(expr)
        return RatFunc(_from_sympy(n, gens), _from_sympy(d, gens))

    def to_text(self) -> str:
        if self.den == MPoly.const(1):
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    def __repr__(self) -> str:
        return f"RatFunc({self.to_text()})"


def _to_rf(v) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, MPoly):
        return RatFunc(v, normalize=False)
    if isinstance(v, (int, Fraction)):
        return RatFunc.const(v)
    raise TypeError(f"cannot convert {type(v).__name__} to RatFunc")


def _normalize(num: MPoly, den: MPoly) -> tuple[MPoly, MPoly]:
    if num.is_zero():
        return num, MPoly.const(1)
    if den.is_constant():
        return num.scale(1 / den.constant_value()), MPoly.const(1)
    common = _monomial_min(num.monomial_gcd(), den.monomial_gcd())
    if any(common):
        num = num.shift_down(common)
        den = den.shift_down(common)
    if den.is_constant():
        return num.scale(1 / den.constant_value()), MPoly.const(1)
    c = den.content()
    if den.leading()[1] < 0:
        c = -c
    if c != 1:
        num = num.scale(1 / c)
        den = den.scale(1 / c)
    return num, den


def _to_sympy(p: MPoly, gens):
    import sympy

    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for g, k in zip(gens, e):
            if k:
                term *= g ** k
        expr += term
    return expr


def _from_sympy(expr, gens) -> MPoly:
    import sympy

    poly = sympy.Poly(sympy.expand(expr), *gens)
    return MPoly({tuple(m): Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})


# --------------------------------------------------------------------------
# operations with the names used throughout the package

def differentiate(f: RatFunc, v: str) -> RatFunc:
    return _to_rf(f).diff(v)


def substitute(f: RatFunc, bindings: Mapping[str, Any]) -> RatFunc:
    return _to_rf(f).substitute(bindings)


def evaluate(f: RatFunc, point: Mapping[str, Any]) -> Fraction:
    return _to_rf(f).evaluate(point)


def divides(g: MPoly, f: MPoly) -> bool:
    if g.is_zero():
        raise ZeroDivisionError("divisor must be nonzero")
    return f.exact_div(g) is not None


# --------------------------------------------------------------------------
# a small, safe expression parser (Python syntax, exact arithmetic)

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def parse(text: str) -> RatFunc:
    """Parse a Python-syntax rational expression, e.g. ``"x + a0/(y+t)"``."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    return _to_rf(_walk(tree.body))


def _walk(node) -> RatFunc:
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = _int_literal(node.right)
            return _to_rf(_walk(node.left)) ** exp
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ValueError(f"unsupported operator {type(node.op).__name__}")
        return op(_to_rf(_walk(node.left)), _to_rf(_walk(node.right)))
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return -_walk(node.operand)
        if isinstance(node.op, ast.UAdd):
            return _walk(node.operand)
    if isinstance(node, ast.Name):
        return RatFunc.var(node.id)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return RatFunc.const(node.value)
    raise ValueError(f"unsupported syntax: {ast.dump(node)}")


def _int_literal(node) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_literal(node.operand)
    raise ValueError("exponents must be integer literals")


RatLike = Union[RatFunc, MPoly, int, Fraction]


def as_ratfunc(v: RatLike | str) -> RatFunc:
    return parse(v) if isinstance(v, str) else _to_rf(v)


def compile_float(exprs: Sequence[RatFunc], argnames: Sequence[str]) -> Callable:
    """Compile rational functions to a float callable ``f(*args) -> tuple``."""
    def poly_src(p: MPoly) -> str:
        if p.is_zero():
            return "0.0"
        parts = []
        for e, c in p.sorted_terms():
            factors = [repr(float(c))]
            for i, k in enumerate(e):
                if k:
                    name = f"_{SYMBOLS.names[i]}"
                    factors.append(name if k == 1 else f"{name}**{k}")
            parts.append("*".join(factors))
        return "(" + " + ".join(parts) + ")"

    for f in exprs:
        missing = f.variables() - set(argnames)
        if missing:
            raise KeyError(f"unbound variables {sorted(missing)}")
    bodies = []
    for f in exprs:
        if f.den == MPoly.const(1):
            bodies.append(poly_src(f.num))
        else:
            bodies.append(f"{poly_src(f.num)}/{poly_src(f.den)}")
    args = ", ".join(f"_{a}" for a in argnames)
    src = f"def _f({args}):\n    return ({', '.join(bodies)},)\n"
    ns: dict[str, Any] = {}
    exec(src, ns)  # generated from exact coefficients only
    return ns["_f"]
