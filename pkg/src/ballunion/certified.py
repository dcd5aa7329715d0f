"""Certified-precision evaluation on top of mpmath's interval context.

Every interval produced here encloses the true value.  Signs are decided by
evaluating an expression at increasing working precision until the enclosure
excludes zero; past the ceiling the sign is reported as undecided (``None``).
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

from mpmath import iv, mpf

from .exact import rational_sqrt

DEFAULT_START_BITS = 128
DEFAULT_CEILING_BITS = 4096
CEILING_ENV = "BALLS_PRECISION_CEILING"


@dataclass(frozen=True)
class PrecisionPolicy:
    start: int = DEFAULT_START_BITS
    ceiling: int = DEFAULT_CEILING_BITS

    def __post_init__(self):
        if self.start < 53 or self.ceiling < self.start:
            raise ValueError(f"bad precision policy {self.start}..{self.ceiling}")

    def levels(self) -> Iterator[int]:
        p = self.start
        while True:
            yield p
            if p >= self.ceiling:
                return
            p = min(2 * p, self.ceiling)


def default_policy() -> PrecisionPolicy:
    raw = os.environ.get(CEILING_ENV)
    if raw is None:
        return PrecisionPolicy()
    ceiling = int(raw)
    return PrecisionPolicy(start=min(DEFAULT_START_BITS, ceiling), ceiling=ceiling)


@contextmanager
def workprec(prec: int):
    """Temporarily set the interval context's working precision."""
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def lo(x) -> mpf:
    return mpf(x.a)


def hi(x) -> mpf:
    return mpf(x.b)


def ivq(value) -> "iv.mpf":
    """Enclosure of a rational at the current working precision."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return iv.mpf(value.numerator)
        return iv.mpf(value.numerator) / value.denominator
    return iv.mpf(value)


def iv_sqrt(x):
    """Square root of an enclosure, clamping a straddled lower end to zero."""
    if lo(x) < 0:
        if hi(x) < 0:
            raise ValueError("square root of a negative enclosure")
        x = iv.mpf([0, x.b])
    return iv.sqrt(x)


def interval_sign(x) -> Optional[int]:
    if x > 0:
        return 1
    if x < 0:
        return -1
    if lo(x) == 0 and hi(x) == 0:
        return 0
    return None


def certified_sign(expr: Callable[[int], object],
                   exact: Optional[Callable[[], int]] = None,
                   policy: PrecisionPolicy = PrecisionPolicy()) -> Optional[int]:
    """Sign of ``expr``, refining precision until decided.

    ``expr(prec)`` is called inside ``iv.workprec(prec)`` and must return an
    interval.  When the first evaluation is inconclusive and an exact route is
    available it settles the question instead of further refinement.
    """
    for prec in policy.levels():
        with workprec(prec):
            s = interval_sign(expr(prec))
        if s is not None:
            return s
        if exact is not None:
            return exact()
    return None


def rational_cos_sin(j: int, m: int) -> Optional[tuple[Fraction, Fraction]]:
    """cos and sin of 2*pi*j/m when both are rational (quarter turns)."""
    r = (4 * j) % (4 * m)
    if r % m:
        return None
    return {0: (Fraction(1), Fraction(0)), 1: (Fraction(0), Fraction(1)),
            2: (Fraction(-1), Fraction(0)), 3: (Fraction(0), Fraction(-1))}[r // m]


def rational_cos(j: int, m: int) -> Optional[Fraction]:
    """cos(2*pi*j/m) when rational: multiples of pi/3 and pi/2."""
    from math import gcd
    g = gcd(j % m, m)
    q = m // g
    p = (j % m) // g
    table = {
        1: {0: Fraction(1)},
        2: {1: Fraction(-1)},
        3: {1: Fraction(-1, 2), 2: Fraction(-1, 2)},
        4: {1: Fraction(0), 3: Fraction(0)},
        6: {1: Fraction(1, 2), 5: Fraction(1, 2)},
    }
    return table.get(q, {}).get(p)


def sin_squared_pi_over(m: int) -> Optional[Fraction]:
    """sin^2(pi/m) when rational."""
    return {1: Fraction(0), 2: Fraction(1), 3: Fraction(3, 4),
            4: Fraction(1, 2), 6: Fraction(1, 4)}.get(m)


@lru_cache(maxsize=None)
def cos_sin_iv(j: int, m: int, prec: int):
    """Enclosures of cos and sin of 2*pi*j/m at ``prec`` bits."""
    exact = rational_cos_sin(j, m)
    with workprec(prec):
        if exact is not None:
            return ivq(exact[0]), ivq(exact[1])
        angle = 2 * iv.pi * j / m
        return iv.cos(angle), iv.sin(angle)


def rotate_iv(p, j: int, m: int, prec: int):
    """Rotate an interval point about the z-axis by 2*pi*j/m."""
    if j % m == 0:
        return p
    c, s = cos_sin_iv(j % m, m, prec)
    x, y, z = p
    return (c * x - s * y, s * x + c * y, z)


def to_decimal_pair(x, digits: int = 20) -> list[str]:
    """``["lo", "hi"]`` decimal strings, rounded outward."""
    from mpmath import mp, nstr
    a, b = lo(x), hi(x)
    with mp.workprec(max(64, 4 * digits)):
        eps = mpf(10) ** (-digits) * max(abs(a), abs(b), mpf(1))
        return [nstr(a - eps, digits), nstr(b + eps, digits)]


def midpoint_float(x) -> float:
    return float((lo(x) + hi(x)) / 2)


def exact_sqrt_iv(d: Fraction):
    r = rational_sqrt(d)
    if r is not None:
        return ivq(r)
    return iv_sqrt(ivq(d))
