"""Ball-like objects: rational balls and balls rotated about the z-axis.

A :class:`RotatedBall` keeps its rotation symbolic as the integer pair
``(j, m)`` (angle ``2*pi*j/m``) and only materializes its center as an
interval enclosure at a requested precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .certified import ivq, rational_cos, rational_cos_sin, rotate_iv, workprec
from .geometry import Ball, Point3, vdot, vsub


@dataclass(frozen=True)
class RotatedBall:
    seed: Ball
    j: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("rotation order m must be positive")

    @property
    def radius(self) -> Fraction:
        return self.seed.radius

    @property
    def radius_sq(self) -> Fraction:
        return self.seed.radius_sq

    @property
    def exact(self) -> Optional[Ball]:
        """The rational ball when the rotation is a quarter turn (or none)."""
        cs = rational_cos_sin(self.j, self.m)
        if cs is None:
            return None
        c, s = cs
        x, y, z = self.seed.center
        return Ball(Point3(c * x - s * y, s * x + c * y, z), self.seed.radius)


BallLike = Union[Ball, RotatedBall]


def exact_ball(ball: BallLike) -> Optional[Ball]:
    if isinstance(ball, Ball):
        return ball
    return ball.exact


@lru_cache(maxsize=None)
def center_iv(ball: BallLike, prec: int):
    """Center enclosure at ``prec`` bits (call inside ``iv.workprec(prec)``)."""
    with workprec(prec):
        if isinstance(ball, Ball):
            return tuple(ivq(v) for v in ball.center)
        seed = tuple(ivq(v) for v in ball.seed.center)
        return rotate_iv(seed, ball.j, ball.m, prec)


def center_floats(ball: BallLike) -> tuple[float, float, float]:
    if isinstance(ball, Ball):
        return tuple(float(v) for v in ball.center)
    import math
    x, y, z = (float(v) for v in ball.seed.center)
    t = 2 * math.pi * ball.j / ball.m
    return (math.cos(t) * x - math.sin(t) * y, math.sin(t) * x + math.cos(t) * y, z)


def same_orbit(a: BallLike, b: BallLike) -> bool:
    """True when both are rotations of one seed by the same order m."""
    return (isinstance(a, RotatedBall) and isinstance(b, RotatedBall)
            and a.seed == b.seed and a.m == b.m)


def on_z_axis(ball: BallLike) -> bool:
    if isinstance(ball, Ball):
        return ball.center.x == 0 and ball.center.y == 0
    return ball.seed.center.x == 0 and ball.seed.center.y == 0


def exact_sq_distance(a: BallLike, b: BallLike) -> Optional[Fraction]:
    """Squared center distance when it is rational (else None)."""
    ea, eb = exact_ball(a), exact_ball(b)
    if ea is not None and eb is not None:
        d = vsub(ea.center.as_tuple(), eb.center.as_tuple())
        return vdot(d, d)
    if same_orbit(a, b):
        cos = rational_cos(b.j - a.j, a.m)
        if cos is None:
            return None
        sx, sy, _ = a.seed.center
        return 2 * (sx * sx + sy * sy) * (1 - cos)
    # an axis center sees every rotation of the other ball identically
    for axis_ball, other in ((a, b), (b, a)):
        if isinstance(axis_ball, Ball) and on_z_axis(axis_ball) and isinstance(other, RotatedBall):
            d = vsub(axis_ball.center.as_tuple(), other.seed.center.as_tuple())
            return vdot(d, d)
    return None
