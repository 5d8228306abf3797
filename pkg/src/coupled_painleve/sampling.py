"""Seeded random rational points and evaluation-based identity testing."""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

from .polys import UnluckyPoint, as_ratfunc

BOUND = 10**6
MAX_RESAMPLES = 100

T = TypeVar("T")


class Indeterminate(RuntimeError):
    """The resampling budget ran out before enough good points were found."""


def derive_seed(master: int, check_id: str) -> int:
    digest = hashlib.sha256(f"{master}:{check_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def check_rng(master: int, check_id: str) -> random.Random:
    return random.Random(derive_seed(master, check_id))


def random_rational(rng: random.Random, bound: int = BOUND) -> Fraction:
    num = rng.randint(-bound, bound)
    den = 0
    while den == 0:
        den = rng.randint(-bound, bound)
    return Fraction(num, den)


def random_point(rng: random.Random, names: Iterable[str], bound: int = BOUND) -> dict[str, Fraction]:
    return {n: random_rational(rng, bound) for n in names}


def with_resampling(
    rng: random.Random,
    sample: Callable[[random.Random], Mapping[str, Fraction]],
    body: Callable[[Mapping[str, Fraction]], T],
    points: int,
) -> list[tuple[Mapping[str, Fraction], T]]:
    """Run ``body`` at ``points`` good sample points, resampling unlucky ones."""
    out = []
    misses = 0
    while len(out) < points:
        p = sample(rng)
        try:
            out.append((p, body(p)))
        except (UnluckyPoint, ZeroDivisionError):
            misses += 1
            if misses > MAX_RESAMPLES:
                raise Indeterminate(f"{misses} unlucky points") from None
    return out


def identical(
    f, g, rng: random.Random, points: int = 25, names: Sequence[str] | None = None
) -> bool:
    """Randomized identity test f == g at seeded rational points."""
    f, g = as_ratfunc(f), as_ratfunc(g)
    names = sorted(f.variables() | g.variables()) if names is None else list(names)
    results = with_resampling(
        rng,
        lambda r: random_point(r, names),
        lambda p: f.evaluate(p) == g.evaluate(p),
        points,
    )
    return all(ok for _, ok in results)
