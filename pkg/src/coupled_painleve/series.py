"""Truncated Laurent series in eps with exact coefficients.

Coefficients are Fractions or RatFuncs (anything with + - * / and a
truthiness zero test).  Every series carries an absolute truncation order:
coefficients are known through ``eps**order`` and nothing beyond is stored.
Arithmetic propagates that order the usual way, so precision lost to
cancellation of negative powers is accounted for rather than silently
fabricated.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping, Sequence

from .polys import MPoly, RatFunc, as_ratfunc

DEFAULT_ORDER = 6
EPS = "eps"


class PrecisionError(ArithmeticError):
    """Not enough known terms to carry out the operation."""


class EssentialSingularity(ValueError):
    """The expression has no Laurent expansion at eps = 0."""


def _zero_like(c):
    return c * 0


class EpsSeries:
    """sum_k coeffs[k] * eps**(min_degree + k) + O(eps**(order + 1))."""

    __slots__ = ("min_degree", "coeffs", "order")

    def __init__(self, min_degree: int, coeffs: Sequence[Any], order: int):
        coeffs = list(coeffs)[: max(0, order - min_degree + 1)]
        lead = 0
        while lead < len(coeffs) and not coeffs[lead]:
            lead += 1
        coeffs = coeffs[lead:]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.min_degree = min_degree + lead if coeffs else order + 1
        self.coeffs = tuple(coeffs)
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, c, order: int) -> "EpsSeries":
        return cls(0, [c], order)

    @classmethod
    def monomial(cls, c, degree: int, order: int) -> "EpsSeries":
        return cls(degree, [c], order)

    @classmethod
    def from_poly_coeffs(cls, coeffs: Mapping[int, Any], order: int) -> "EpsSeries":
        if not coeffs:
            return cls(order + 1, [], order)
        lo = min(coeffs)
        hi = max(coeffs)
        zero = _zero_like(next(iter(coeffs.values())))
        return cls(lo, [coeffs.get(k, zero) for k in range(lo, hi + 1)], order)

    # access -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def valuation(self) -> int:
        return self.min_degree

    def coeff(self, k: int):
        if k > self.order:
            raise PrecisionError(f"eps^{k} beyond truncation order {self.order}")
        i = k - self.min_degree
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def as_dict(self) -> dict[int, Any]:
        return {self.min_degree + i: c for i, c in enumerate(self.coeffs) if c}

    def truncate(self, order: int) -> "EpsSeries":
        if order > self.order:
            raise PrecisionError(f"cannot extend order {self.order} to {order}")
        return EpsSeries(self.min_degree, self.coeffs, order)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "EpsSeries":
        if isinstance(other, EpsSeries):
            return other
        # exact scalars are known to every order
        return EpsSeries(0, [other], self.order)

    def __add__(self, other) -> "EpsSeries":
        if not isinstance(other, EpsSeries):
            return self._add_scalar(other)
        order = min(self.order, other.order)
        lo = min(self.min_degree, other.min_degree)
        if lo > order:
            return EpsSeries(order + 1, [], order)
        out = [None] * (order - lo + 1)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.min_degree + i - lo
                if k < len(out):
                    out[k] = c if out[k] is None else out[k] + c
        zero = Fraction(0)
        return EpsSeries(lo, [zero if c is None else c for c in out], order)

    def _add_scalar(self, c) -> "EpsSeries":
        if not c:
            return self
        if self.order < 0:
            return self
        d = self.as_dict()
        d[0] = d[0] + c if 0 in d else c
        return EpsSeries.from_poly_coeffs(d, self.order)

    __radd__ = __add__

    def __neg__(self) -> "EpsSeries":
        return EpsSeries(self.min_degree, [-c for c in self.coeffs], self.order)

    def __sub__(self, other) -> "EpsSeries":
        return self + (-other)

    def __rsub__(self, other) -> "EpsSeries":
        return (-self) + other

    def __mul__(self, other) -> "EpsSeries":
        if not isinstance(other, EpsSeries):
            if not other:
                return EpsSeries(self.order + 1, [], self.order)
            return EpsSeries(self.min_degree, [c * other for c in self.coeffs], self.order)
        v1, v2 = self.min_degree, other.min_degree
        order = min(self.order + v2, other.order + v1)
        lo = v1 + v2
        if not self.coeffs or not other.coeffs or lo > order:
            return EpsSeries(order + 1, [], order)
        n = order - lo + 1
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n):
            acc = None
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                term = a[i] * b[k - i]
                acc = term if acc is None else acc + term
            out.append(Fraction(0) if acc is None else acc)
        return EpsSeries(lo, out, order)

    def __rmul__(self, other) -> "EpsSeries":
        return self * other

    def inverse(self) -> "EpsSeries":
        if not self.coeffs:
            raise PrecisionError("inverse of a series with no known nonzero term")
        v = self.min_degree
        rel = self.order - v  # relative precision
        a = self.coeffs
        inv0 = 1 / a[0]
        b = [inv0]
        for k in range(1, rel + 1):
            acc = None
            for i in range(1, min(k, len(a) - 1) + 1):
                term = a[i] * b[k - i]
                acc = term if acc is None else acc + term
            b.append(Fraction(0) if acc is None else -acc * inv0)
        return EpsSeries(-v, b, -v + rel)

    def __truediv__(self, other) -> "EpsSeries":
        if isinstance(other, EpsSeries):
            return self * other.inverse()
        return self * (1 / other)

    def __rtruediv__(self, other) -> "EpsSeries":
        return self.inverse() * other

    def __pow__(self, n: int) -> "EpsSeries":
        if not isinstance(n, int):
            raise TypeError("use binomial() for non-integer powers")
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result if result is not None else EpsSeries(0, [Fraction(1)], self.order)

    def map_coeffs(self, fn) -> "EpsSeries":
        return EpsSeries(self.min_degree, [fn(c) for c in self.coeffs], self.order)

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*eps^{self.min_degree + i}" for i, c in enumerate(self.coeffs) if c)
        return f"EpsSeries({body or '0'} + O(eps^{self.order + 1}))"


# --------------------------------------------------------------------------

def binomial_coeff(c: Fraction, n: int) -> Fraction:
    """Generalized binomial coefficient C(c, n) for rational c."""
    out = Fraction(1)
    for k in range(n):
        out = out * (c - k) / (k + 1)
    return out


def binomial(u: EpsSeries, c, order: int | None = None) -> EpsSeries:
    """Formal (1 + u)**c = 1 + sum_{n>=1} C(c, n) u**n for u with positive valuation."""
    c = Fraction(c)
    if u.coeffs and u.min_degree <= 0:
        raise EssentialSingularity("binomial series needs u = O(eps)")
    order = u.order if order is None else min(order, u.order)
    result = EpsSeries(0, [Fraction(1)], order)
    if not u.coeffs:
        return result
    power = EpsSeries(0, [Fraction(1)], order)
    n = 1
    while n * u.min_degree <= order:
        power = power * u
        result = result + power * binomial_coeff(c, n)
        n += 1
    return result.truncate(min(order, result.order))


def series_expand(f, order: int = DEFAULT_ORDER, point: Mapping[str, Fraction] | None = None) -> EpsSeries:
    """Laurent expansion of a rational function in eps through eps**order.

    With ``point`` the remaining variables are bound to exact numbers and the
    coefficients are Fractions; otherwise coefficients are RatFuncs.
    """
    f = as_ratfunc(f)
    if point is not None:
        bound = {k: v for k, v in point.items() if k != EPS}
        f = f.partial_substitute(bound)
    num = _poly_in_eps(f.num, point is not None)
    den = _poly_in_eps(f.den, point is not None)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return EpsSeries(order + 1, [], order)
    vn, vd = min(num), min(den)
    work = order + 2 * abs(vd) + abs(vn) + max(den) + 2
    n_s = EpsSeries.from_poly_coeffs(num, work)
    d_s = EpsSeries.from_poly_coeffs(den, work)
    return (n_s / d_s).truncate(order)


def _poly_in_eps(p: MPoly, numeric: bool) -> dict[int, Any]:
    parts = p.coefficients_in(EPS)
    out = {}
    for k, c in parts.items():
        if numeric:
            if not c.is_constant():
                raise ValueError(f"unbound variables {sorted(c.variables())}")
            out[k] = c.constant_value()
        else:
            out[k] = RatFunc(c, normalize=False)
    return out
