"""Exact checks of the two structural claims and a certified tracer for the curve
where one ring sphere meets the boundary of the chain union.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import iv, mpf

from .arrangement import Arrangement
from .balls import center_iv
from .certified import (PrecisionPolicy, certified_sign, default_policy, hi, interval_sign,
                        ivq, lo, midpoint_float, sin_squared_pi_over, to_decimal_pair, workprec)
from .construction import ConstructionParams, build_family, default_x, default_z
from .exact import as_fraction, format_fraction
from .geometry import Circle3, Degenerate, ExtPoint, circle_top_point, sphere_sphere_circle, vadd, vcross, vdot, vscale, vsub

HOLDS, FAILS, NOT_APPLICABLE, UNDECIDED = "holds", "fails", "not-applicable", "undecided"


@dataclass
class ClaimReport:
    claim_id: int
    k: int
    m: int
    verdict: str
    witnesses: dict = field(default_factory=dict)
    margin: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        return {"claim": self.claim_id, "k": self.k, "m": self.m, "n": self.k + self.m,
                "verdict": self.verdict, "witnesses": self.witnesses,
                "margin": self.margin, "note": self.note}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _seed(params: ConstructionParams, x=None, z=None) -> tuple[Fraction, Fraction]:
    n = params.n
    return (default_x(n) if x is None else as_fraction(x),
            default_z(n) if z is None else as_fraction(z))


def pk_h(params: ConstructionParams, x=None, z=None) -> Fraction:
    """Distance along the seed's horizontal line whose being below 1 lifts the curve
    above the top chain center: ``(x^2 + (z - z_k)^2) / (2x)``."""
    x, z = _seed(params, x, z)
    if x <= 0:
        raise ValueError("seed offset x must be positive")
    zk = Fraction(params.k - 1, params.n ** 4)
    return (x * x + (z - zk) ** 2) / (2 * x)


def pk_h_closed_form(n: int) -> Fraction:
    """Displayed closed form, valid for the balanced split k = n/2."""
    if n < 2:
        raise ValueError("n must be at least 2")
    num = 16 * n ** 6 - 40 * n ** 4 - 16 * n ** 3 - 15 * n ** 2 + 28 * n + 68
    return Fraction(num, 16 * n ** 4 * (n * n - 2))


def ell_squared(n: int, x=None, z=None) -> Fraction:
    """Squared distance from the x-axis of the curve's crossings with the plane z = 0."""
    if n < 2:
        raise ValueError("n must be at least 2")
    x = default_x(n) if x is None else as_fraction(x)
    z = default_z(n) if z is None else as_fraction(z)
    if x <= 0:
        raise ValueError("seed offset x must be positive")
    h = (z * z + x * x) / (2 * x)
    return 1 - h * h


def ell_squared_closed_form(n: int) -> Fraction:
    return Fraction(2 * n ** 6 + 3 * n ** 4 - 4 * n ** 2 - 4, n ** 8)


def _approx(q: Fraction) -> str:
    return f"{float(q):.6g}"


def _ext_str(e: ExtPoint, i: int) -> str:
    a, b = format_fraction(e.a[i]), format_fraction(e.b[i])
    if e.b[i] == 0:
        return a
    return f"{a} + ({b})*sqrt({format_fraction(e.d)})"


def verify_claim1(params: ConstructionParams, x=None, z=None) -> ClaimReport:
    """The curve reaches the top chain ball: exact test of pk_h < 1, plus an
    independent exact check that the highest point of the top chain sphere's
    circle with the seed sphere lies above the top chain center."""
    rep = ClaimReport(1, params.k, params.m, NOT_APPLICABLE)
    try:
        value = pk_h(params, x, z)
    except ValueError as exc:
        rep.note = str(exc)
        return rep
    fam = build_family(params, x, z)
    zk = fam.chain[-1].center.z
    circle = sphere_sphere_circle(fam.chain[-1], fam.ring_seed)
    if not isinstance(circle, Circle3):
        rep.note = "top chain sphere and seed sphere do not cross transversally"
        return rep
    top = circle_top_point(circle)
    if isinstance(top, Degenerate):
        rep.note = "crossing circle is horizontal"
        return rep
    above = top.coordinate_sign(2, zk) > 0
    rep.witnesses = {
        "pk_h": format_fraction(value),
        "pk_h_below_one": value < 1,
        "top_point_z": _ext_str(top, 2),
        "z_k": format_fraction(zk),
        "top_point_above_z_k": above,
    }
    rep.margin = f"1 - pk_h = {format_fraction(1 - value)} (approx {_approx(1 - value)})"
    if value < 1 and above:
        rep.verdict = HOLDS
    else:
        rep.verdict = FAILS
        if (value < 1) != above:
            rep.note = "the two exact routes disagree"
    return rep


def verify_claim2(params: ConstructionParams, x=None, z=None,
                  policy: Optional[PrecisionPolicy] = None) -> ClaimReport:
    """The off-axis part of the curve fits in one sector: exact test of
    ``ell^2 < 4/n^2`` and a certified test of ``4/n^2 <= sin^2(pi/m)``."""
    policy = policy or default_policy()
    n, m = params.n, params.m
    rep = ClaimReport(2, params.k, m, NOT_APPLICABLE)
    if m < 2:
        rep.note = "sin(pi/m) = 0 for m = 1; the sector bound is vacuous"
        return rep
    try:
        l2 = ell_squared(n, *_seed(params, x, z))
    except ValueError as exc:
        rep.note = str(exc)
        return rep
    bound = Fraction(4, n * n)
    width_ok = l2 < bound
    s2 = sin_squared_pi_over(m)
    if s2 is not None:
        sine_ok: Optional[bool] = bound <= s2
        sine_w = format_fraction(s2)
    else:
        def expr(prec):
            s = iv.sin(iv.pi / m)
            return s * s - ivq(bound)

        sg = certified_sign(expr, policy=policy)
        sine_ok = None if sg is None else sg >= 0
        with workprec(policy.start):
            s = iv.sin(iv.pi / m)
            sine_w = to_decimal_pair(s * s)
    rep.witnesses = {
        "ell_squared": format_fraction(l2),
        "four_over_n_squared": format_fraction(bound),
        "ell_squared_below_bound": width_ok,
        "sin_squared_pi_over_m": sine_w,
        "bound_below_sin_squared": sine_ok,
    }
    rep.margin = f"4/n^2 - ell^2 = {format_fraction(bound - l2)} (approx {_approx(bound - l2)})"
    if sine_ok is None:
        rep.verdict = UNDECIDED
        rep.note = "sine comparison undecided at the precision ceiling"
    else:
        rep.verdict = HOLDS if width_ok and sine_ok else FAILS
    return rep


# -- curve tracing --

class TraceError(RuntimeError):
    pass


@dataclass
class GammaTrace:
    j: int
    m: int
    points: list  # interval triples
    tags: list[int]  # 1-based chain index of the sphere each point lies on
    prec: int
    samples_per_arc: int
    arcs: int

    def floats(self) -> list[tuple[float, float, float]]:
        return [tuple(midpoint_float(c) for c in p) for p in self.points]

    def to_obj(self) -> str:
        lines = [f"# curve on ring sphere {self.j}, {len(self.points)} points"]
        lines += ["v %.12g %.12g %.12g" % p for p in self.floats()]
        idx = " ".join(str(i + 1) for i in range(len(self.points)))
        lines.append(f"l {idx} 1")
        return "\n".join(lines) + "\n"


def _rotate_about(center, unit_axis, p, phi):
    # Rodrigues rotation of p about the circle axis by the interval angle phi
    r = vsub(p, center)
    return vadd(center, vadd(vscale(r, iv.cos(phi)), vscale(vcross(unit_axis, r), iv.sin(phi))))


def gamma_trace(params: ConstructionParams, j: int = 1, sample_count: int = 32,
                policy: Optional[PrecisionPolicy] = None, max_samples: int = 1 << 14) -> GammaTrace:
    """Trace the curve where ring sphere j (1-based) meets the chain union's boundary.

    Arcs are linked into one closed cycle; each arc is sampled at equal angle
    steps, doubling the density until consecutive points are within
    (2*pi/m)/64 in azimuth.
    """
    policy = policy or default_policy()
    if not 1 <= j <= params.m:
        raise ValueError(f"ring index j must be in 1..{params.m}")
    fam = build_family(params)
    k = params.k
    balls = list(fam.chain) + [fam.ring_ball(j - 1)]
    arr = Arrangement(balls, policy=policy).build()
    s = k
    arcs = []  # (pair, start, end)
    for pair in sorted(arr.circles_on(s)):
        for u, v in arr.sub_arcs(pair):
            if arr.arc_exposed(pair, u, v):
                arcs.append((pair, u, v))
    if not arcs:
        raise TraceError("ring sphere does not meet the chain union's boundary")
    cycle = _link(arr, arcs, s, fam, j)
    prec = policy.start
    limit = (2 * math.pi / params.m) / 64
    count = max(2, sample_count)
    while True:
        points, tags = _sample_cycle(arr, balls, cycle, count, prec)
        gap = _max_azimuth_gap(points)
        if gap <= limit or count >= max_samples:
            break
        count *= 2
    return GammaTrace(j, params.m, points, tags, prec, count, len(cycle))


def _link(arr: Arrangement, arcs: list, s: int, fam, j: int) -> list:
    """Order arcs into one cycle as ``(pair, a, b, forward)`` steps."""
    if len(arcs) == 1 and arcs[0][1] is None:
        return [(arcs[0][0], None, None, True)]
    if any(u is None for _, u, _ in arcs):
        raise TraceError("curve mixes full circles with arcs")
    by_vertex: dict = {}
    for idx, (_, u, v) in enumerate(arcs):
        by_vertex.setdefault(u, []).append(idx)
        by_vertex.setdefault(v, []).append(idx)
    if any(len(ix) != 2 for ix in by_vertex.values()):
        raise TraceError("curve has a vertex of degree other than two")
    start = _start_arc(arr, arcs, fam, j)
    cycle, used = [], set()
    idx, forward = start, True
    while idx not in used:
        used.add(idx)
        pair, u, v = arcs[idx]
        a, b = (u, v) if forward else (v, u)
        cycle.append((pair, a, b, forward))
        nxt = [i for i in by_vertex[b] if i != idx] or [idx]
        idx = nxt[0]
        forward = arcs[idx][1] == b
    if len(used) != len(arcs):
        raise TraceError("curve does not close into a single cycle")
    return cycle


def _start_arc(arr: Arrangement, arcs: list, fam, j: int) -> int:
    # highest start vertex; mirror-image ties go to the positive azimuth side
    theta = 2 * math.pi * (j - 1) / fam.m

    def key(i):
        x, y, z = arr.registry.points[arcs[i][1]].floats
        rel = math.remainder(math.atan2(y, x) - theta, 2 * math.pi)
        return (round(z, 12), rel > 0)

    return max(range(len(arcs)), key=key)


def _arc_angle(g_center, unit, a, b):
    ra, rb = vsub(a, g_center), vsub(b, g_center)
    ang = iv.atan2(vdot(vcross(unit, ra), rb), vdot(ra, rb))
    if hi(ang) < 0 or (lo(ang) < 0 and midpoint_float(ang) < 0):
        ang = ang + 2 * iv.pi
    return ang


def _sample_cycle(arr: Arrangement, balls, cycle, count: int, prec: int):
    points, tags = [], []
    with workprec(prec):
        for pair, a, b, forward in cycle:
            g = arr.geometry(pair, prec)
            unit = vscale(g.axis, 1 / iv.sqrt(vdot(g.axis, g.axis)))
            tag = min(pair) + 1
            if a is None:
                start = _circle_top(g)
                span = 2 * iv.pi
            else:
                start = arr.registry.points[a].iv(prec)
                end = arr.registry.points[b].iv(prec)
                if forward:
                    span = _arc_angle(g.center, unit, start, end)
                else:
                    span = _arc_angle(g.center, vscale(unit, -1), start, end)
            sgn = 1 if forward else -1
            for i in range(count):
                phi = sgn * span * i / count
                points.append(_rotate_about(g.center, unit, start, phi))
                tags.append(tag)
    return points, tags


def _circle_top(g):
    a = g.axis
    aa = vdot(a, a)
    v = (-a[2] * a[0] / aa, -a[2] * a[1] / aa, 1 - a[2] * a[2] / aa)
    vv = vdot(v, v)
    if interval_sign(vv) != 1:
        raise TraceError("horizontal circle has no distinguished start point")
    return vadd(g.center, vscale(v, g.radius / iv.sqrt(vv)))


def _max_azimuth_gap(points) -> float:
    az = [math.atan2(midpoint_float(p[1]), midpoint_float(p[0])) for p in points]
    gaps = [abs(math.remainder(az[(i + 1) % len(az)] - az[i], 2 * math.pi)) for i in range(len(az))]
    return max(gaps) if gaps else 0.0


def gamma_ball_coverage(trace: GammaTrace) -> set[int]:
    return set(trace.tags)


@dataclass
class AngularExtent:
    """Rigorous lower and upper bounds (radians) on the sampled angular spread."""

    lower: mpf
    upper: mpf
    points: int
    note: str = ""

    def below(self, bound_fn) -> Optional[bool]:
        """Certified ``extent <= bound``; ``bound_fn(prec)`` encloses the bound."""
        with workprec(256):
            b = bound_fn(256)
            if self.upper <= lo(b):
                return True
            if self.lower > hi(b):
                return False
        return None

    def to_dict(self) -> dict:
        if self.points == 0:
            return {"extent": ["0", "0"], "points": 0, "note": self.note}
        return {"extent": [_down(self.lower), _up(self.upper)], "points": self.points,
                "note": self.note}


def _down(x: mpf) -> str:
    return to_decimal_pair(iv.mpf(x))[0]


def _up(x: mpf) -> str:
    return to_decimal_pair(iv.mpf(x))[1]


def gamma_angular_extent(trace: GammaTrace) -> AngularExtent:
    """Angular spread about the z-axis of the trace points off the bottom chain sphere."""
    with workprec(trace.prec):
        theta = 2 * iv.pi * (trace.j - 1) / trace.m
        rel = []
        for p, tag in zip(trace.points, trace.tags):
            if tag == 1:
                continue
            phi = iv.atan2(p[1], p[0]) - theta
            shift = round(midpoint_float(phi) / (2 * math.pi))
            rel.append(phi - 2 * iv.pi * shift)
        if not rel:
            return AngularExtent(mpf(0), mpf(0), 0, "no points off the bottom chain sphere")
        upper = iv.mpf(max(hi(r) for r in rel)) - iv.mpf(min(lo(r) for r in rel))
        lower = iv.mpf(max(lo(r) for r in rel)) - iv.mpf(min(hi(r) for r in rel))
        return AngularExtent(max(mpf(0), lo(lower)), hi(upper), len(rel))


def sector_angle(m: int):
    """``bound_fn`` for :meth:`AngularExtent.below`: encloses 2*pi/m."""
    return lambda prec: 2 * iv.pi / m


def sphere_residual(trace: GammaTrace, params: ConstructionParams):
    """Enclosures of ``|p - c|^2 - 1`` for every point against the ring sphere."""
    fam = build_family(params)
    ball = fam.ring_ball(trace.j - 1)
    with workprec(trace.prec):
        c = center_iv(ball, trace.prec)
        return [vdot(vsub(p, c), vsub(p, c)) - ivq(ball.radius_sq) for p in trace.points]
