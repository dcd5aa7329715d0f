"""Exact sign arithmetic over the rationals and one- or two-radical extensions.

Numbers of the form ``a + b*sqrt(d)`` (a, b, d rational, d >= 0) are decided
exactly by comparing squares; sums involving two distinct radicands are
reduced to the single-radicand case by one more squaring step.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

Rational = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_fraction(value: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def sign(value: Rational) -> int:
    return (value > 0) - (value < 0)


def rational_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    if value < 0:
        return None
    p, q = value.numerator, value.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def sign_qsqrt(a: Rational, b: Rational, d: Rational) -> int:
    """Sign of ``a + b*sqrt(d)`` for ``d >= 0``."""
    if d < 0:
        raise ValueError("radicand must be non-negative")
    sa, sb = sign(a), sign(b) if d else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: the larger magnitude wins
    diff = a * a - b * b * d
    if diff > 0:
        return sa
    if diff < 0:
        return sb
    return 0


def sign_two_radicals(a: Rational, b: Rational, c: Rational, e: Rational,
                      d1: Rational, d2: Rational) -> int:
    """Sign of ``(a + b*sqrt(d1)) + sqrt(d2)*(c + e*sqrt(d1))``."""
    su = sign_qsqrt(a, b, d1)
    sw = sign_qsqrt(c, e, d1) if d2 else 0
    if sw == 0:
        return su
    if su == 0 or su == sw:
        return sw
    # compare U^2 against d2*W^2, both in Q[sqrt(d1)]
    r = sign_qsqrt(a * a + b * b * d1 - d2 * (c * c + e * e * d1),
                   2 * a * b - 2 * d2 * c * e, d1)
    if r > 0:
        return su
    if r < 0:
        return sw
    return 0
