"""The ball family: k chain balls on a short vertical segment and m ring balls.

Chain ball i (1-based) is centered at ``(0, 0, (i-1)/n^4)``; the ring seed is
centered at ``(x, 0, z)`` with ``x = (2n^2-4)/n^4`` and ``z = -(2n^2-4)/n^3``,
and ring ball j is the seed rotated about the z-axis by ``2*pi*j/m``.
All chain and seed data are exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence


from .balls import BallLike, RotatedBall, center_iv, exact_sq_distance
from .certified import PrecisionPolicy, hi, ivq, lo, to_decimal_pair, workprec
from .exact import as_fraction, format_fraction
from .geometry import Ball, Circle3, Point3, sphere_sphere_circle, vdot, vsub


class InvalidParameters(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionParams:
    k: int
    m: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidParameters("k must be ≥ 1")
        if not isinstance(self.m, int) or self.m < 1:
            raise InvalidParameters("m must be ≥ 1")

    @property
    def n(self) -> int:
        return self.k + self.m


def default_x(n: int) -> Fraction:
    return Fraction(2 * n * n - 4, n ** 4)


def default_z(n: int) -> Fraction:
    return -Fraction(2 * n * n - 4, n ** 3)


@dataclass(frozen=True)
class BallFamily:
    params: ConstructionParams
    chain: tuple[Ball, ...]
    ring_seed: Ball
    ring_angles: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def x(self) -> Fraction:
        return self.ring_seed.center.x

    @property
    def z(self) -> Fraction:
        return self.ring_seed.center.z

    def ring_ball(self, j: int) -> RotatedBall:
        """Ring ball with 0-based index j (j = 0 is the seed)."""
        jj, m = self.ring_angles[j]
        return RotatedBall(self.ring_seed, jj, m)

    def ring_center_iv(self, j: int, prec: int = 128):
        return center_iv(self.ring_ball(j), prec)

    def balls(self) -> list[BallLike]:
        """Chain balls followed by ring balls, in index order."""
        return list(self.chain) + [self.ring_ball(j) for j in range(len(self.ring_angles))]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "chain": [_ball_dict(b) for b in self.chain],
            "ring_seed": _ball_dict(self.ring_seed),
            "ring_angles": [list(a) for a in self.ring_angles],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "BallFamily":
        params = ConstructionParams(int(data["k"]), int(data["m"]))
        chain = tuple(_ball_from_dict(b) for b in data["chain"])
        seed = _ball_from_dict(data["ring_seed"])
        angles = tuple((int(j), int(m)) for j, m in data["ring_angles"])
        if len(chain) != params.k or len(angles) != params.m:
            raise InvalidParameters("family counts do not match k and m")
        return cls(params, chain, seed, angles)

    @classmethod
    def from_json(cls, text: str) -> "BallFamily":
        return cls.from_dict(json.loads(text))


def _ball_dict(b: Ball) -> dict:
    return {"center": [format_fraction(v) for v in b.center], "r": format_fraction(b.radius)}


def _ball_from_dict(d: dict) -> Ball:
    return Ball(Point3.of([as_fraction(v) for v in d["center"]]), as_fraction(d.get("r", "1")))


def build_family(params: ConstructionParams, x: Optional[Fraction] = None,
                 z: Optional[Fraction] = None) -> BallFamily:
    """Build the exact family; ``x`` and ``z`` optionally override the seed center."""
    n = params.n
    x = default_x(n) if x is None else as_fraction(x)
    z = default_z(n) if z is None else as_fraction(z)
    step = Fraction(1, n ** 4)
    chain = tuple(Ball(Point3(0, 0, i * step)) for i in range(params.k))
    seed = Ball(Point3(x, 0, z))
    angles = tuple((j, params.m) for j in range(params.m))
    return BallFamily(params, chain, seed, angles)


# -- diagnostics --

@dataclass
class OriginReport:
    margins: list[Fraction]
    passed: bool

    def to_dict(self) -> dict:
        return {"passed": self.passed, "margins": [format_fraction(v) for v in self.margins]}


def origin_containment_check(f: BallFamily) -> OriginReport:
    """Exact margin ``r^2 - |center|^2`` for every ball (positive = origin inside).

    Rotation about the z-axis preserves ``|center|``, so one exact seed check
    covers every ring ball.
    """
    margins = [b.radius_sq - vdot(b.center.as_tuple(), b.center.as_tuple()) for b in f.chain]
    seed = f.ring_seed
    ring_margin = seed.radius_sq - vdot(seed.center.as_tuple(), seed.center.as_tuple())
    margins += [ring_margin] * len(f.ring_angles)
    return OriginReport(margins, all(m > 0 for m in margins))


@dataclass
class MinDistance:
    value: Optional[Fraction]
    interval: Optional[object]  # enclosing interval
    pair: Optional[tuple[int, int]]
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "value": None if self.value is None else format_fraction(self.value),
            "interval": None if self.interval is None else to_decimal_pair(self.interval),
            "pair": None if self.pair is None else list(self.pair),
            "note": self.note,
        }


def _distance_class(a: BallLike, b: BallLike):
    """Key shared by pairs whose squared distances are provably equal."""
    from .balls import same_orbit
    if same_orbit(a, b):
        d = (b.j - a.j) % a.m
        return ("orbit", a.seed, a.m, min(d, a.m - d))
    return None


def min_pairwise_center_distance(f, policy: PrecisionPolicy = PrecisionPolicy()) -> MinDistance:
    """Minimum squared center distance over all pairs (exact when rational).

    Accepts a :class:`BallFamily` or a plain sequence of balls.
    """
    balls = f.balls() if isinstance(f, BallFamily) else list(f)
    if len(balls) < 2:
        return MinDistance(None, None, None, "no pairs")
    pairs = list(combinations(range(len(balls)), 2))
    exact = {p: exact_sq_distance(balls[p[0]], balls[p[1]]) for p in pairs}
    for prec in policy.levels():
        with workprec(prec):
            vals = {}
            for p in pairs:
                if exact[p] is not None:
                    vals[p] = ivq(exact[p])
                else:
                    d = vsub(center_iv(balls[p[0]], prec), center_iv(balls[p[1]], prec))
                    vals[p] = vdot(d, d)
            best_hi = min(hi(v) for v in vals.values())
            contenders = [p for p in pairs if lo(vals[p]) <= best_hi]
        exact_vals = {exact[p] for p in contenders}
        classes = {_distance_class(balls[p[0]], balls[p[1]]) for p in contenders}
        if (len(contenders) == 1 or (None not in exact_vals and len(exact_vals) == 1)
                or (None not in classes and len(classes) == 1)):
            p = contenders[0]
            v = vals[p]
            return MinDistance(exact[p], v, p)
    p = min(pairs, key=lambda q: hi(vals[q]))
    v = vals[p]
    return MinDistance(exact[p], v, p, "minimum not separated at precision ceiling")


@dataclass
class ChainReport:
    passed: bool
    circle_heights: list[Fraction] = field(default_factory=list)
    failures: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "circle_heights": [format_fraction(h) for h in self.circle_heights],
            "failures": [[i, why] for i, why in self.failures],
        }


def chain_structure_check(f: BallFamily) -> ChainReport:
    """Check the chain union's narrow-cylinder structure exactly.

    (a) adjacent chain spheres cross transversally, (b) each crossing circle
    is horizontal with height in ``[0, k/n^4]``, (c) the total chain height is
    below ``1/n^3``.  Failures carry the 1-based index of the lower ball.
    """
    n, k = f.n, len(f.chain)
    report = ChainReport(True)
    upper = Fraction(k, n ** 4)
    for i in range(k - 1):
        circle = sphere_sphere_circle(f.chain[i], f.chain[i + 1])
        if not isinstance(circle, Circle3):
            report.failures.append((i + 1, "adjacent chain spheres do not cross transversally"))
            continue
        ax = circle.axis
        if ax.x != 0 or ax.y != 0:
            report.failures.append((i + 1, "crossing circle is not horizontal"))
            continue
        h = circle.plane_point.z
        report.circle_heights.append(h)
        if not 0 <= h <= upper:
            report.failures.append((i + 1, f"circle height {format_fraction(h)} outside [0, k/n^4]"))
    if k >= 2:
        height = f.chain[-1].center.z - f.chain[0].center.z
        if not height < Fraction(1, n ** 3):
            report.failures.append((k, "chain height not below 1/n^3"))
    report.passed = not report.failures
    return report


def family_balls(source) -> list[BallLike]:
    if isinstance(source, BallFamily):
        return source.balls()
    return list(source)


def balls_from_json(text: str) -> tuple[Optional[BallFamily], list[BallLike]]:
    """Parse a family file or a plain ``{"balls": [...]}`` list."""
    data = json.loads(text)
    if "chain" in data:
        fam = BallFamily.from_dict(data)
        return fam, fam.balls()
    if "balls" in data:
        return None, [_ball_from_dict(b) for b in data["balls"]]
    raise ValueError("expected a family ('chain') or a ball list ('balls')")


def balls_to_json(balls: Sequence[Ball]) -> str:
    return json.dumps({"balls": [_ball_dict(b) for b in balls]}, separators=(",", ":")) + "\n"
