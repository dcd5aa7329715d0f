"""Exact geometric primitives for balls, sphere-sphere circles and triple points.

Everything here is computed over the rationals, with triple points and the
top points of circles living in a one-square-root extension Q[sqrt(d)].
Degenerate situations (tangency, collinear centers, horizontal circles) are
returned as explicit :class:`Degenerate` values instead of being perturbed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Sequence, Union

from .exact import as_fraction, rational_sqrt, sign, sign_qsqrt, sign_two_radicals


class Sign(IntEnum):
    """Position of a point relative to a ball (sign of ``|p-c|^2 - r^2``)."""

    INSIDE = -1
    ON_BOUNDARY = 0
    OUTSIDE = 1


class DegenerateInput(ValueError):
    """Raised when an operation is undefined for its input (e.g. concentric spheres)."""


# -- small vector helpers; work for Fractions and interval numbers alike --

def vsub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vscale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


def vdot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vcross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True)
class Point3:
    x: Fraction
    y: Fraction
    z: Fraction

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @classmethod
    def of(cls, seq: Sequence) -> "Point3":
        x, y, z = seq
        return cls(x, y, z)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z)

    def __iter__(self):
        return iter(self.as_tuple())


ORIGIN = Point3(0, 0, 0)


@dataclass(frozen=True)
class Ball:
    center: Point3
    radius: Fraction = Fraction(1)

    def __post_init__(self):
        if not isinstance(self.center, Point3):
            object.__setattr__(self, "center", Point3.of(self.center))
        object.__setattr__(self, "radius", as_fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def radius_sq(self) -> Fraction:
        return self.radius * self.radius


@dataclass(frozen=True)
class Circle3:
    """Circle in space: center, (unnormalized) plane normal and squared radius."""

    plane_point: Point3
    axis: Point3
    radius_sq: Fraction


@dataclass(frozen=True)
class ExtPoint:
    """Point with coordinates ``a_i + b_i*sqrt(d)`` sharing one radicand ``d``."""

    a: tuple[Fraction, Fraction, Fraction]
    b: tuple[Fraction, Fraction, Fraction]
    d: Fraction

    def __post_init__(self):
        a = tuple(as_fraction(v) for v in self.a)
        b = tuple(as_fraction(v) for v in self.b)
        d = as_fraction(self.d)
        if d < 0:
            raise ValueError("radicand must be non-negative")
        root = rational_sqrt(d)
        if root is not None:
            # fold a rational root into the rational part
            a = tuple(ai + bi * root for ai, bi in zip(a, b))
            b = (Fraction(0),) * 3
            d = Fraction(0)
        elif not any(b):
            d = Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def rational(cls, p: Point3 | Sequence) -> "ExtPoint":
        return cls(tuple(p), (0, 0, 0), 0)

    @property
    def is_rational(self) -> bool:
        return self.d == 0

    @property
    def on_z_axis(self) -> bool:
        return self.a[0] == 0 and self.a[1] == 0 and self.b[0] == 0 and self.b[1] == 0

    def coordinate_sign(self, i: int, value: Fraction = Fraction(0)) -> int:
        """Sign of coordinate ``i`` minus ``value``."""
        return sign_qsqrt(self.a[i] - value, self.b[i], self.d)

    def to_floats(self) -> tuple[float, float, float]:
        from math import sqrt
        r = sqrt(float(self.d))
        return tuple(float(ai) + float(bi) * r for ai, bi in zip(self.a, self.b))

    def __eq__(self, other):
        if not isinstance(other, ExtPoint):
            return NotImplemented
        if self.d == other.d:
            return self.a == other.a and self.b == other.b
        return all(
            sign_two_radicals(a1 - a2, b1, -b2, 0, self.d, other.d) == 0
            for a1, b1, a2, b2 in zip(self.a, self.b, other.a, other.b))

    def __hash__(self):
        # equal irrational points may carry different radicands; no cheap
        # canonical form exists, so they all share one bucket
        return hash(self.a) if self.d == 0 else hash("irrational-ext-point")


@dataclass(frozen=True)
class Degenerate:
    """Explicit degeneracy report; ``points`` holds any representative points."""

    reason: str
    points: tuple = ()


def ball_contains(ball: Ball, p: Point3) -> Sign:
    """Exact classification of a rational point against a ball."""
    diff = vsub(tuple(p), tuple(ball.center))
    return Sign(sign(vdot(diff, diff) - ball.radius_sq))


def _pair_offset(b1: Ball, b2: Ball):
    axis = vsub(tuple(b2.center), tuple(b1.center))
    d2 = vdot(axis, axis)
    if d2 == 0:
        raise DegenerateInput("concentric spheres have no radical plane")
    return axis, d2


def sphere_sphere_circle(b1: Ball, b2: Ball) -> Union[Circle3, Degenerate, None]:
    """Intersection circle of two spheres via the radical plane.

    Returns a :class:`Circle3` for a transversal crossing, ``Degenerate``
    ("tangent", with the touching point) when the spheres touch, and ``None``
    when they are disjoint or one is nested inside the other.
    """
    axis, d2 = _pair_offset(b1, b2)
    q1, q2 = b1.radius_sq, b2.radius_sq
    # center = c1 + lam*axis, on the radical plane
    lam = (d2 + q1 - q2) / (2 * d2)
    rho = q1 - lam * lam * d2
    center = Point3.of(vadd(tuple(b1.center), vscale(axis, lam)))
    if rho > 0:
        return Circle3(center, Point3.of(axis), rho)
    if rho == 0:
        return Degenerate("tangent", (center,))
    return None


def triple_points(b1: Ball, b2: Ball, b3: Ball) -> Union[list, Degenerate]:
    """Common points of three spheres, exactly, in Q[sqrt(d)].

    The two radical planes meet in a line ``p0 + t*u``; substituting into the
    first sphere gives ``t^2 = D``.  Returns 0 or 2 :class:`ExtPoint` values,
    or ``Degenerate`` for a tangential single point or collinear centers.
    """
    c1 = b1.center.as_tuple()
    out = _triple_solution(c1, b2.center.as_tuple(), b3.center.as_tuple(),
                           b1.radius_sq, b2.radius_sq, b3.radius_sq)
    if out is None:
        return Degenerate("collinear")
    p0, u, D = out
    if D < 0:
        return []
    if D == 0:
        return Degenerate("tangent", (ExtPoint.rational(p0),))
    return [ExtPoint(p0, u, D), ExtPoint(p0, vscale(u, -1), D)]


def triple_frame(c1, c2, c3):
    n1 = vsub(c2, c1)
    n2 = vsub(c3, c1)
    u = vcross(n1, n2)
    return n1, n2, u, vdot(u, u)


def triple_solve(c1, n1, n2, u, uu, q1, q2, q3):
    """Base point and parameter square of the radical line (generic arithmetic)."""
    e1 = (vdot(n1, n1) + q1 - q2) / 2
    e2 = (vdot(n2, n2) + q1 - q3) / 2
    off = vscale(vadd(vscale(vcross(n2, u), e1), vscale(vcross(u, n1), e2)), 1 / uu)
    p0 = vadd(c1, off)
    D = (q1 - vdot(off, off)) / uu
    return p0, D


def _triple_solution(c1, c2, c3, q1, q2, q3):
    n1, n2, u, uu = triple_frame(c1, c2, c3)
    if uu == 0:
        return None
    p0, D = triple_solve(c1, n1, n2, u, Fraction(uu), q1, q2, q3)
    return p0, u, D


def ext_point_in_ball_sign(p: ExtPoint, ball: Ball) -> Sign:
    """Exact sign of ``|p - c|^2 - r^2`` for a point in Q[sqrt(d)]."""
    rel = [ai - ci for ai, ci in zip(p.a, ball.center.as_tuple())]
    A = sum(r * r for r in rel) + p.d * sum(bi * bi for bi in p.b) - ball.radius_sq
    B = 2 * sum(r * bi for r, bi in zip(rel, p.b))
    return Sign(sign_qsqrt(A, B, p.d))


def circle_top_point(c: Circle3) -> Union[ExtPoint, Degenerate]:
    """Point of maximal z on a circle, exactly.

    The direction is the projection of the z unit vector onto the circle's
    plane.  A horizontal circle has no unique top point; a representative
    point is returned inside a ``Degenerate("horizontal")`` report.
    """
    a = c.axis.as_tuple()
    aa = vdot(a, a)
    if aa == 0:
        raise DegenerateInput("circle axis must be nonzero")
    # v = e_z - (a_z/|a|^2) a
    v = (-a[2] * a[0] / aa, -a[2] * a[1] / aa, 1 - a[2] * a[2] / aa)
    vv = vdot(v, v)
    if vv == 0:
        w = vcross(a, (Fraction(1), Fraction(0), Fraction(0)))
        if vdot(w, w) == 0:
            w = vcross(a, (Fraction(0), Fraction(1), Fraction(0)))
        rep = ExtPoint(c.plane_point.as_tuple(), w, c.radius_sq / vdot(w, w))
        return Degenerate("horizontal", (rep,))
    return ExtPoint(c.plane_point.as_tuple(), v, c.radius_sq / vv)


def circle_points_rational(c: Circle3) -> list[Point3]:
    """A few exact points of a circle when its radius and a plane basis allow.

    Uses rational parametrizations ``((1-t^2), 2t)/(1+t^2)`` of the unit
    circle on an orthogonal basis whose norms square-root rationally with the
    radius; returns an empty list when no such basis is found.
    """
    a = c.axis.as_tuple()
    candidates = [(Fraction(1), Fraction(0), Fraction(0)),
                  (Fraction(0), Fraction(1), Fraction(0)),
                  (Fraction(0), Fraction(0), Fraction(1))]
    for g in candidates:
        e1 = vcross(a, g)
        n1 = vdot(e1, e1)
        if n1 == 0:
            continue
        e2 = vcross(a, e1)
        n2 = vdot(e2, e2)
        s1 = rational_sqrt(c.radius_sq / n1)
        s2 = rational_sqrt(c.radius_sq / n2)
        if s1 is None or s2 is None:
            continue
        pts = []
        for t in (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2)):
            cs = (1 - t * t) / (1 + t * t)
            sn = 2 * t / (1 + t * t)
            off = vadd(vscale(e1, s1 * cs), vscale(e2, s2 * sn))
            pts.append(Point3.of(vadd(c.plane_point.as_tuple(), off)))
        return pts
    return []
