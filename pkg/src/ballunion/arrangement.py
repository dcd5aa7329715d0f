"""Arrangement of sphere-sphere circles on the boundary of a union of balls.

The engine enumerates triple points, keeps those not strictly inside any
other ball, splits every intersection circle at its vertices, classifies one
sample per sub-arc and assembles per-sphere faces.  Every sign is exact when
the inputs are rational and certified by interval refinement otherwise.

With a :class:`RingSymmetry` only one representative per rotation orbit of
triples and circles is computed; the rest is transported by rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np
from mpmath import iv, mpf

from .balls import (BallLike, RotatedBall, center_floats, center_iv, exact_ball,
                    exact_sq_distance, same_orbit)
from .certified import (PrecisionPolicy, certified_sign, default_policy, exact_sqrt_iv, hi,
                        interval_sign, iv_sqrt, ivq, lo, midpoint_float, rational_cos_sin,
                        rotate_iv, workprec)
from .exact import sign
from .geometry import (Degenerate, DegenerateInput, ExtPoint, Sign, ext_point_in_ball_sign,
                       sphere_sphere_circle, triple_frame, triple_points, triple_solve,
                       vadd, vcross, vdot, vscale, vsub)

CELL = 1e-9  # registry grid size; points closer than this get a certified comparison


# -- points --

class CPoint:
    """A point given exactly in Q[sqrt d] or through interval enclosures."""

    __slots__ = ("exact", "_fn", "_cache", "floats")

    def __init__(self, exact: Optional[ExtPoint] = None,
                 fn: Optional[Callable[[int], tuple]] = None, start: int = 128):
        if exact is None and fn is None:
            raise ValueError("a point needs an exact value or an enclosure function")
        self.exact = exact
        self._fn = fn
        self._cache = {}
        self.floats = tuple(midpoint_float(c) for c in self.iv(start))

    def iv(self, prec: int):
        got = self._cache.get(prec)
        if got is None:
            with workprec(prec):
                if self.exact is not None:
                    e = self.exact
                    root = exact_sqrt_iv(e.d)
                    got = tuple(ivq(a) + ivq(b) * root for a, b in zip(e.a, e.b))
                else:
                    got = self._fn(prec)
            self._cache[prec] = got
        return got


def rotated_point(p: CPoint, t: int, m: int) -> CPoint:
    """``p`` rotated about the z-axis by ``2*pi*t/m``."""
    if t % m == 0:
        return p
    e = p.exact
    if e is not None:
        if e.on_z_axis:
            return p
        cs = rational_cos_sin(t, m)
        if cs is not None:
            c, s = cs
            a, b = e.a, e.b
            return CPoint(ExtPoint((c * a[0] - s * a[1], s * a[0] + c * a[1], a[2]),
                                   (c * b[0] - s * b[1], s * b[0] + c * b[1], b[2]), e.d))
    return CPoint(fn=lambda prec: rotate_iv(p.iv(prec), t, m, prec))


def point_ball_sign(p: CPoint, ball: BallLike, policy: PrecisionPolicy) -> Optional[Sign]:
    """Sign of ``|p - c|^2 - r^2``; ``None`` when undecided at the ceiling."""
    e = p.exact
    if e is not None:
        eb = exact_ball(ball)
        if eb is not None:
            return ext_point_in_ball_sign(e, eb)
        if e.on_z_axis and isinstance(ball, RotatedBall):
            # rotation about the axis fixes the point
            return ext_point_in_ball_sign(e, ball.seed)

    def expr(prec):
        d = vsub(p.iv(prec), center_iv(ball, prec))
        return vdot(d, d) - ivq(ball.radius_sq)

    s = certified_sign(expr, policy=policy)
    return None if s is None else Sign(s)


# -- symmetry --

class RingSymmetry:
    """Rotation group of order m acting on the ring indices, fixing the rest."""

    def __init__(self, m: int, ring: Sequence[int]):
        if len(ring) != m:
            raise ValueError("ring must list one ball index per rotation")
        self.m = m
        self.ring = tuple(ring)
        self._pos = {i: j for j, i in enumerate(self.ring)}
        self._canon = {}

    def act(self, t: int, i: int) -> int:
        j = self._pos.get(i)
        return i if j is None else self.ring[(j + t) % self.m]

    def image(self, t: int, idxs: Sequence[int]) -> tuple:
        return tuple(sorted(self.act(t, i) for i in idxs))

    def canon(self, idxs: tuple) -> tuple[tuple, int]:
        """Orbit representative ``rep`` and ``t`` with ``image(t, rep) == idxs``."""
        got = self._canon.get(idxs)
        if got is None:
            best = None
            for t in range(self.m):
                img = self.image(-t, idxs)
                if best is None or img < best[0]:
                    best = (img, t)
            got = self._canon[idxs] = best
        return got

    def orbit_size(self, idxs: tuple) -> int:
        return len({self.image(t, idxs) for t in range(self.m)})

    def check(self, balls: Sequence[BallLike]):
        seed = None
        for j, i in enumerate(self.ring):
            b = balls[i]
            if not isinstance(b, RotatedBall) or b.m != self.m or b.j % self.m != j:
                raise ValueError(f"ball {i} is not ring rotation {j} of order {self.m}")
            if seed is not None and b.seed != seed:
                raise ValueError("ring balls must share one seed")
            seed = b.seed
        for i, b in enumerate(balls):
            if i not in self._pos:
                ex = exact_ball(b)
                if ex is None or ex.center.x != 0 or ex.center.y != 0:
                    raise ValueError(f"ball {i} is neither a ring ball nor on the axis")


# -- flags --

@dataclass
class Flags:
    """Degeneracy flags; any entry makes the counts non-authoritative."""

    entries: dict = field(default_factory=dict)
    resolved: dict = field(default_factory=dict)

    def add(self, kind: str, item):
        self.entries.setdefault(kind, []).append(item)

    def note(self, kind: str, item):
        self.resolved.setdefault(kind, []).append(item)

    def __bool__(self):
        return any(self.entries.values())


# -- pairs and triples --

CROSS, TANGENT, APART, FIRST_INSIDE, SECOND_INSIDE, UNDECIDED = (
    "cross", "tangent", "apart", "first-inside", "second-inside", "undecided")


def pair_relation(a: BallLike, b: BallLike, policy: PrecisionPolicy) -> str:
    ra, rb = a.radius, b.radius
    d2 = exact_sq_distance(a, b)
    if d2 is not None:
        if d2 == 0:
            if ra == rb:
                raise DegenerateInput("identical balls")
            return FIRST_INSIDE if ra < rb else SECOND_INSIDE
        s_out = sign(d2 - (ra + rb) ** 2)
        s_in = sign(d2 - (ra - rb) ** 2)
    else:
        def dist(prec):
            d = vsub(center_iv(a, prec), center_iv(b, prec))
            return vdot(d, d)
        s_out = certified_sign(lambda p: dist(p) - ivq((ra + rb) ** 2), policy=policy)
        s_in = certified_sign(lambda p: dist(p) - ivq((ra - rb) ** 2), policy=policy)
        if s_out is None or s_in is None:
            return UNDECIDED
    if s_out > 0:
        return APART
    if s_out == 0 or s_in == 0:
        return TANGENT
    if s_in > 0:
        return CROSS
    return FIRST_INSIDE if ra < rb else SECOND_INSIDE


@dataclass
class TripleResult:
    status: str  # points | none | tangent | coplanar | undecided
    points: list = field(default_factory=list)


def _axis_poles(seed) -> TripleResult:
    # three rotations of one sphere meet exactly on the rotation axis
    cx, cy, cz = seed.center
    D = seed.radius_sq - cx * cx - cy * cy
    if D < 0:
        return TripleResult("none")
    if D == 0:
        return TripleResult("tangent", [CPoint(ExtPoint.rational((0, 0, cz)))])
    return TripleResult("points", [CPoint(ExtPoint((0, 0, cz), (0, 0, 1), D)),
                                   CPoint(ExtPoint((0, 0, cz), (0, 0, -1), D))])


def compute_triple(a: BallLike, b: BallLike, c: BallLike, policy: PrecisionPolicy) -> TripleResult:
    if same_orbit(a, b) and same_orbit(a, c):
        return _axis_poles(a.seed)
    ea, eb, ec = exact_ball(a), exact_ball(b), exact_ball(c)
    if ea is not None and eb is not None and ec is not None:
        got = triple_points(ea, eb, ec)
        if isinstance(got, Degenerate):
            if got.reason == "tangent":
                return TripleResult("tangent", [CPoint(p) for p in got.points])
            c1, c2 = sphere_sphere_circle(ea, eb), sphere_sphere_circle(ea, ec)
            if c1 == c2:
                return TripleResult("coplanar")
            return TripleResult("none")
        if not got:
            return TripleResult("none")
        return TripleResult("points", [CPoint(p) for p in got])

    q = [x.radius_sq for x in (a, b, c)]

    def solve(prec):
        c1, c2, c3 = (center_iv(x, prec) for x in (a, b, c))
        n1, n2, u, uu = triple_frame(c1, c2, c3)
        qs = [ivq(v) for v in q]
        return (c1, n1, n2, u, uu, qs)

    for prec in policy.levels():
        with workprec(prec):
            c1, n1, n2, u, uu, qs = solve(prec)
            if interval_sign(uu) != 1:
                continue
            _, D = triple_solve(c1, n1, n2, u, uu, *qs)
            sD = interval_sign(D)
        if sD is None:
            continue
        if sD < 0:
            return TripleResult("none")
        if sD == 0:
            return TripleResult("tangent")
        return TripleResult("points", [CPoint(fn=_triple_point_fn(solve, s)) for s in (1, -1)])
    return TripleResult("undecided")


def _triple_point_fn(solve, s: int):
    def fn(prec):
        c1, n1, n2, u, uu, qs = solve(prec)
        p0, D = triple_solve(c1, n1, n2, u, uu, *qs)
        return vadd(p0, vscale(u, s * iv_sqrt(D)))
    return fn


# -- vertex registry --

class VertexRegistry:
    """Deduplicates points; equality is exact or certified, never by tolerance."""

    def __init__(self, policy: PrecisionPolicy, flags: Flags):
        self.points: list[CPoint] = []
        self.grid: dict = {}
        self.policy = policy
        self.flags = flags

    @staticmethod
    def _cell(f):
        return tuple(int(np.floor(v / CELL)) for v in f)

    def _same(self, p: CPoint, q: CPoint) -> bool:
        if p.exact is not None and q.exact is not None:
            return p.exact == q.exact

        def expr(prec):
            d = vsub(p.iv(prec), q.iv(prec))
            return vdot(d, d)

        s = certified_sign(expr, policy=self.policy)
        if s is None:
            self.flags.add("unresolved_coincidence", [list(p.floats), list(q.floats)])
            return True
        return s == 0

    def add(self, p: CPoint) -> int:
        cx, cy, cz = self._cell(p.floats)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for vid in self.grid.get((cx + dx, cy + dy, cz + dz), ()):
                        if self._same(p, self.points[vid]):
                            return vid
        vid = len(self.points)
        self.points.append(p)
        self.grid.setdefault((cx, cy, cz), []).append(vid)
        return vid


# -- circles --

class CircleGeometry:
    """Interval geometry of one intersection circle at a given precision."""

    def __init__(self, a: BallLike, b: BallLike, prec: int):
        with workprec(prec):
            ca, cb = center_iv(a, prec), center_iv(b, prec)
            axis = vsub(cb, ca)
            d2 = vdot(axis, axis)
            qa, qb = ivq(a.radius_sq), ivq(b.radius_sq)
            lam = (d2 + qa - qb) / (2 * d2)
            self.center = vadd(ca, vscale(axis, lam))
            self.radius = iv_sqrt(qa - lam * lam * d2)
            self.axis = axis
            unit = vscale(axis, 1 / iv.sqrt(d2))
            fl = [abs(midpoint_float(v)) for v in axis]
            g = [ivq(0)] * 3
            g[fl.index(min(fl))] = ivq(1)
            e1 = vcross(unit, g)
            self.e1 = vscale(e1, 1 / iv.sqrt(vdot(e1, e1)))
            self.e2 = vcross(unit, self.e1)
            self.prec = prec

    def angle(self, p):
        with workprec(self.prec):
            d = vsub(p, self.center)
            x, y = vdot(d, self.e1), vdot(d, self.e2)
            th = iv.atan2(y, x)
            if hi(th) - lo(th) > 1:
                # straddles the branch cut: measure from the opposite ray
                th = iv.atan2(-y, -x) + iv.pi
            return th

    def point_at(self, beta: mpf):
        with workprec(self.prec):
            b = iv.mpf(beta)
            cs, sn = iv.cos(b), iv.sin(b)
            off = vadd(vscale(self.e1, cs * self.radius), vscale(self.e2, sn * self.radius))
            return vadd(self.center, off)

    def tangent(self, p):
        """Direction of increasing angle at a point of the circle."""
        with workprec(self.prec):
            return vcross(self.axis, vsub(p, self.center))


@dataclass
class CircleData:
    pair: tuple[int, int]
    vertices: list[int] = field(default_factory=list)  # cyclic order, increasing angle
    betas: list = field(default_factory=list)  # sample angle after each vertex
    prec: int = 128
    sorted_ok: bool = True


# -- the arrangement --

@dataclass
class SphereFaces:
    index: int
    faces: int
    cycles: int
    cap_components: int
    covered: bool = False


@dataclass
class EulerResult:
    sphere: int
    vertices: int
    edges: int
    faces: int
    components: int
    passed: bool
    skipped: str = ""

    def to_dict(self) -> dict:
        return {"sphere": self.sphere, "V": self.vertices, "E": self.edges, "F": self.faces,
                "components": self.components, "passed": self.passed, "skipped": self.skipped}


class Arrangement:
    """Boundary arrangement of a union of balls.

    Call :meth:`build` once; afterwards ``vertex_count``, ``edge_count``,
    ``face_count``, the per-sphere data and :meth:`euler` are available.
    """

    def __init__(self, balls: Sequence[BallLike], symmetry: Optional[RingSymmetry] = None,
                 policy: Optional[PrecisionPolicy] = None):
        if not balls:
            raise ValueError("need at least one ball")
        self.balls = list(balls)
        self.n = len(self.balls)
        self.sym = symmetry
        if symmetry is not None:
            symmetry.check(self.balls)
        self.policy = policy or default_policy()
        self.flags = Flags()
        self.registry = VertexRegistry(self.policy, self.flags)
        self.relation: dict = {}
        self.covered = [False] * self.n
        self.triples: dict = {}
        self.vertex_triples: dict[int, set] = {}
        self.origin: dict[int, tuple[int, int]] = {}
        self.rotmap: dict[tuple[int, int], int] = {}
        self.boundary: dict[int, bool] = {}
        self.circles: dict[tuple, CircleData] = {}
        self.arc_status: dict[tuple, dict] = {}
        self.sphere_faces: dict[int, SphereFaces] = {}
        self._geom: dict = {}
        self._fcenters = np.array([center_floats(b) for b in self.balls], dtype=float)
        self._frad2 = np.array([float(b.radius_sq) for b in self.balls], dtype=float)

    # -- symmetry helpers --

    def canon(self, idxs: tuple) -> tuple[tuple, int]:
        if self.sym is None:
            return idxs, 0
        return self.sym.canon(idxs)

    def rotate_vertex(self, vid: int, t: int) -> int:
        if self.sym is None or t % self.sym.m == 0:
            return vid
        r, s = self.origin[vid]
        return self.rotmap[(r, (s + t) % self.sym.m)]

    def rep_spheres(self) -> list[int]:
        return [i for i in range(self.n) if self.canon((i,))[0] == (i,)]

    def sphere_rep(self, i: int) -> int:
        return self.canon((i,))[0][0]

    def geometry(self, pair: tuple, prec: int) -> CircleGeometry:
        key = (pair, prec)
        g = self._geom.get(key)
        if g is None:
            g = self._geom[key] = CircleGeometry(self.balls[pair[0]], self.balls[pair[1]], prec)
        return g

    # -- pipeline --

    def build(self) -> "Arrangement":
        self._pairs()
        self._triples()
        self._classify_vertices()
        self._sort_circles()
        self._classify_arcs()
        self._faces()
        return self

    def _pairs(self):
        for a, b in combinations(range(self.n), 2):
            rel = pair_relation(self.balls[a], self.balls[b], self.policy)
            self.relation[(a, b)] = rel
            if rel == TANGENT:
                self.flags.add("tangent_pairs", [a, b])
            elif rel == UNDECIDED:
                self.flags.add("undecided_signs", ["pair", a, b])
            elif rel == FIRST_INSIDE:
                self.covered[a] = True
            elif rel == SECOND_INSIDE:
                self.covered[b] = True

    def crossing(self, a: int, b: int) -> bool:
        return self.relation[(a, b) if a < b else (b, a)] == CROSS

    def _triples(self):
        m = self.sym.m if self.sym else 1
        cross_nb = {i: set() for i in range(self.n)}
        for (a, b), rel in self.relation.items():
            if rel == CROSS:
                cross_nb[a].add(b)
                cross_nb[b].add(a)
        for a in range(self.n):
            for b in sorted(x for x in cross_nb[a] if x > a):
                for c in sorted(x for x in cross_nb[a] & cross_nb[b] if x > b):
                    tri = (a, b, c)
                    if self.canon(tri)[0] != tri:
                        continue
                    res = compute_triple(*(self.balls[i] for i in tri), self.policy)
                    self.triples[tri] = res
                    if res.status in ("tangent", "coplanar", "undecided"):
                        kind = "undecided_signs" if res.status == "undecided" else f"{res.status}_triples"
                        self.flags.add(kind, list(tri))
                    if res.status == "points":
                        self._register(tri, res.points, m)

    def _register(self, tri: tuple, points: list, m: int):
        # rotations beyond the orbit size map the triple onto itself, so only
        # the first ``size`` images are registered and the rest are inferred
        size = self.sym.orbit_size(tri) if self.sym else 1
        reps = []
        for p in points:
            rep = None
            for t in range(size):
                vid = self.registry.add(rotated_point(p, t, m) if t else p)
                if rep is None:
                    rep = vid
                self.origin.setdefault(vid, (rep, t))
                self.rotmap[(rep, t)] = vid
                img = self.sym.image(t, tri) if self.sym else tri
                self.vertex_triples.setdefault(vid, set()).add(img)
            reps.append(rep)
        if size == m:
            return
        # the stabilizing rotation permutes the triple's own points
        perm = {}
        for p, rep in zip(points, reps):
            q = rotated_point(p, size, m)
            perm[rep] = next((r for p2, r in zip(points, reps) if self.registry._same(q, p2)), rep)
        for t in range(size, m):
            for rep in reps:
                self.rotmap[(rep, t)] = self.rotmap[(perm[rep], t - size)]

    def triple_status(self, tri: tuple) -> Optional[TripleResult]:
        return self.triples.get(self.canon(tuple(sorted(tri)))[0])

    def defining(self, vid: int) -> set:
        return {i for tri in self.vertex_triples[vid] for i in tri}

    def _float_order(self, p: Sequence[float], skip: set) -> list[int]:
        d = self._fcenters - np.asarray(p, dtype=float)
        margin = np.einsum("ij,ij->i", d, d) - self._frad2
        return [int(i) for i in np.argsort(margin, kind="stable") if int(i) not in skip]

    def _classify_vertices(self):
        for vid in range(len(self.registry.points)):
            rep, t = self.origin[vid]
            if t != 0 or rep != vid:
                continue
            p = self.registry.points[vid]
            skip = self.defining(vid)
            if len(skip) > 3:
                self.flags.note("multi_sphere_vertices", sorted(skip))
            on_boundary = True
            for i in self._float_order(p.floats, skip):
                s = point_ball_sign(p, self.balls[i], self.policy)
                if s is Sign.INSIDE:
                    on_boundary = False
                    break
                if s is None:
                    self.flags.add("undecided_signs", ["vertex", vid, i])
                elif s is Sign.ON_BOUNDARY:
                    self.flags.add("vertex_on_extra_sphere", [vid, i])
            self.boundary[vid] = on_boundary
        for vid in range(len(self.registry.points)):
            if vid not in self.boundary:
                self.boundary[vid] = self.boundary[self.origin[vid][0]]

    def needed_circles(self) -> list[tuple]:
        reps = set(self.rep_spheres())
        return [pair for pair, rel in sorted(self.relation.items())
                if rel == CROSS and (pair[0] in reps or pair[1] in reps)]

    def _sort_circles(self):
        on_circle: dict[tuple, set] = {}
        for vid, tris in self.vertex_triples.items():
            for tri in tris:
                for pair in combinations(tri, 2):
                    on_circle.setdefault(pair, set()).add(vid)
        for pair in self.needed_circles():
            vids = sorted(on_circle.get(pair, ()))
            self.circles[pair] = self._sort_one(pair, vids)

    def _sort_one(self, pair: tuple, vids: list[int]) -> CircleData:
        if not vids:
            return CircleData(pair, [], [mpf(0)], self.policy.start)
        if len(vids) == 1:
            self.flags.add("single_vertex_circles", list(pair))
        last = None
        for prec in self.policy.levels():
            g = self.geometry(pair, prec)
            ang = [(g.angle(self.registry.points[v].iv(prec)), v) for v in vids]
            ang.sort(key=lambda av: (lo(av[0]) + hi(av[0])) / 2)
            with workprec(prec):
                two_pi = 2 * iv.pi
                ok = all(hi(ang[i][0]) < lo(ang[i + 1][0]) for i in range(len(ang) - 1))
                ok = ok and hi(ang[-1][0]) < lo(ang[0][0] + two_pi)
                last = (ang, prec, lo(two_pi))
            if ok:
                break
        else:
            self.flags.add("unresolved_circle_order", list(pair))
        ang, prec, two_pi = last
        order = [v for _, v in ang]
        betas = []
        for i in range(len(ang)):
            start = hi(ang[i][0])
            end = lo(ang[i + 1][0]) if i + 1 < len(ang) else lo(ang[0][0]) + two_pi
            betas.append((start + end) / 2)
        return CircleData(pair, order, betas, prec)

    def sub_arcs(self, pair: tuple) -> list[tuple]:
        """Sub-arcs ``(start, end)`` in increasing angle; ``(None, None)`` for a bare circle."""
        vs = self.circles[pair].vertices
        if not vs:
            return [(None, None)]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def _sample_exposed(self, pair: tuple, beta: mpf, start_prec: int) -> Optional[bool]:
        cache = {}

        def sample(prec):
            got = cache.get(prec)
            if got is None:
                got = cache[prec] = self.geometry(pair, max(prec, start_prec)).point_at(beta)
            return got

        levels = [p for p in self.policy.levels() if p >= start_prec] or [start_prec]
        policy = PrecisionPolicy(levels[0], levels[-1])
        skip = set(pair)
        undecided = False
        for i in self._float_order([midpoint_float(v) for v in sample(levels[0])], skip):
            ball = self.balls[i]

            def expr(prec, ball=ball):
                d = vsub(sample(prec), center_iv(ball, prec))
                return vdot(d, d) - ivq(ball.radius_sq)

            s = certified_sign(expr, policy=policy)
            if s is not None and s < 0:
                return False
            if s is None or s == 0:
                undecided = True
        return None if undecided else True

    def _classify_arcs(self):
        for pair in self.circles:
            if self.canon(pair)[0] != pair:
                continue
            data = self.circles[pair]
            status = {}
            for (u, v), beta in zip(self.sub_arcs(pair), data.betas):
                s = self._sample_exposed(pair, beta, data.prec)
                if s is None:
                    self.flags.add("undecided_signs", ["arc", list(pair), u, v])
                    s = True
                status[(u, v)] = s
            self.arc_status[pair] = status

    def arc_exposed(self, pair: tuple, u, v) -> bool:
        """Exposure of sub-arc ``u -> v`` on any circle, transported from its representative."""
        rep, t = self.canon(pair)
        if rep == pair:
            return self.arc_status[pair][(u, v)]
        if u is not None:
            u, v = self.rotate_vertex(u, -t), self.rotate_vertex(v, -t)
            if self.sym.act(t, rep[0]) != pair[0]:
                u, v = v, u
        got = self.arc_status[rep].get((u, v))
        if got is None:
            self.flags.add("transport_mismatch", [list(pair), u, v])
            return True
        return got

    # -- counts --

    @property
    def vertex_count(self) -> int:
        return sum(1 for v in self.boundary.values() if v)

    @property
    def edge_count(self) -> int:
        total = 0
        for pair, status in self.arc_status.items():
            mult = self.sym.orbit_size(pair) if self.sym else 1
            total += mult * sum(1 for s in status.values() if s)
        return total

    @property
    def face_count(self) -> int:
        return sum(self.faces_of(i) for i in range(self.n))

    def faces_of(self, i: int) -> int:
        return self.sphere_faces[self.sphere_rep(i)].faces

    def circles_on(self, s: int) -> list[tuple]:
        return [p for p in self.circles if s in p]

    def _faces(self):
        for s in self.rep_spheres():
            if self.covered[s]:
                self.sphere_faces[s] = SphereFaces(s, 0, 0, 1, covered=True)
                continue
            uf = _UnionFind()
            deg: dict[int, int] = {}
            full = 0
            for pair in self.circles_on(s):
                for u, v in self.sub_arcs(pair):
                    if not self.arc_exposed(pair, u, v):
                        continue
                    if u is None:
                        full += 1
                        continue
                    uf.union(u, v)
                    deg[u] = deg.get(u, 0) + 1
                    deg[v] = deg.get(v, 0) + 1
            for vid, d in deg.items():
                if d != 2:
                    self.flags.add("vertex_degree", [s, vid, d])
            cycles = len({uf.find(v) for v in deg}) + full
            caps = self._cap_components(s)
            faces = 1 + cycles - caps
            if faces < 0:
                self.flags.add("negative_faces", [s, faces])
                faces = 0
            self.sphere_faces[s] = SphereFaces(s, faces, cycles, caps)

    def _cap_components(self, s: int) -> int:
        caps = [b for b in range(self.n) if b != s and self.crossing(s, b)]
        uf = _UnionFind()
        for b in caps:
            uf.find(b)
        groups = len(caps)
        for b1, b2 in combinations(caps, 2):
            if groups <= 1:
                break
            if uf.find(b1) == uf.find(b2):
                continue
            if self._caps_meet(s, b1, b2):
                uf.union(b1, b2)
                groups -= 1
        return groups

    def _caps_meet(self, s: int, b1: int, b2: int) -> bool:
        rel = self.relation[(b1, b2) if b1 < b2 else (b2, b1)]
        if rel == APART:
            return False
        if rel in (FIRST_INSIDE, SECOND_INSIDE, TANGENT, UNDECIDED):
            return True
        res = self.triple_status((s, b1, b2))
        if res is None or res.status != "none":
            return True
        # disjoint circles: the caps meet iff one circle lies inside the other ball
        for c, other in ((b1, b2), (b2, b1)):
            pair = (s, c) if s < c else (c, s)
            p = CPoint(fn=lambda pr, pair=pair: self.geometry(pair, pr).point_at(mpf(0)))
            sg = point_ball_sign(p, self.balls[other], self.policy)
            if sg is None or sg is Sign.ON_BOUNDARY:
                self.flags.add("undecided_signs", ["cap", s, c, other])
                return True
            if sg is Sign.INSIDE:
                return True
        return False

    # -- per-sphere summaries --

    def sphere_summary(self, i: int) -> dict:
        r = self.sphere_rep(i)
        verts = sum(1 for vid, ok in self.boundary.items() if ok and r in self.defining(vid))
        arcs = 0
        for pair in self.circles_on(r):
            arcs += sum(1 for u, v in self.sub_arcs(pair) if self.arc_exposed(pair, u, v))
        return {"index": i, "vertices": verts, "arcs": arcs, "faces": self.faces_of(i)}

    # -- Euler check on a sphere's full arrangement --

    def euler(self, s: int) -> EulerResult:
        if self.covered[s]:
            return EulerResult(s, 0, 0, 1, 0, True, "sphere covered by another ball")
        pairs = self.circles_on(s)
        if not pairs:
            return EulerResult(s, 0, 0, 1, 0, True, "no circles")
        edges = []  # (tail, head, pair, index)
        at: dict = {}  # vertex -> list of darts (edge, +1 leaving tail / -1 leaving head)
        for pair in pairs:
            vs = self.circles[pair].vertices
            if not vs:
                dummy = ("loop", pair)
                e = len(edges)
                edges.append((dummy, dummy, pair))
                at.setdefault(dummy, []).extend([(e, 1), (e, -1)])
                continue
            for i in range(len(vs)):
                e = len(edges)
                edges.append((vs[i], vs[(i + 1) % len(vs)], pair))
                at.setdefault(vs[i], []).append((e, 1))
                at.setdefault(vs[(i + 1) % len(vs)], []).append((e, -1))
        rotation = {}
        for v, darts in at.items():
            if isinstance(v, tuple):
                rotation[v] = darts
                continue
            order = self._rotation_at(s, v, darts, edges)
            if order is None:
                return EulerResult(s, 0, 0, 0, 0, False, "undecided rotation")
            rotation[v] = order
        nxt = {}
        for v, order in rotation.items():
            for i, d in enumerate(order):
                nxt[d] = order[(i + 1) % len(order)]
        seen = set()
        uf = _UnionFind()
        for tail, head, _ in edges:
            uf.union(tail, head)
        orbits: dict = {}
        for d0 in nxt:
            if d0 in seen:
                continue
            d = d0
            while d not in seen:
                seen.add(d)
                twin = (d[0], -d[1])
                d = nxt[twin]
            root = uf.find(edges[d0[0]][0] if d0[1] == 1 else edges[d0[0]][1])
            orbits[root] = orbits.get(root, 0) + 1
        comp_v: dict = {}
        comp_e: dict = {}
        for v in at:
            r = uf.find(v)
            comp_v[r] = comp_v.get(r, 0) + 1
        for tail, _, _ in edges:
            r = uf.find(tail)
            comp_e[r] = comp_e.get(r, 0) + 1
        passed = all(comp_v[r] - comp_e[r] + orbits.get(r, 0) == 2 for r in comp_v)
        n_comp = len(comp_v)
        dummies = sum(1 for v in at if isinstance(v, tuple))
        W = sum(orbits.values())
        return EulerResult(s, len(at) - dummies, len(edges) - dummies, W - n_comp + 1,
                           n_comp, passed)

    def _rotation_at(self, s: int, v: int, darts: list, edges: list) -> Optional[list]:
        """Darts at ``v`` in counter-clockwise order around the outward normal of sphere s."""
        for prec in self.policy.levels():
            with workprec(prec):
                p = self.registry.points[v].iv(prec)
                normal = vsub(p, center_iv(self.balls[s], prec))
                tang = {}
                for e, d in darts:
                    pair = edges[e][2]
                    if pair not in tang:
                        tang[pair] = self.geometry(pair, prec).tangent(p)
                if len(tang) == 2 and len(darts) == 4:
                    (pa, ta), (pb, tb) = tang.items()
                    sg = interval_sign(vdot(normal, vcross(ta, tb)))
                    if sg is None or sg == 0:
                        continue
                    by = {(edges[e][2], d): (e, d) for e, d in darts}
                    bs = 1 if sg > 0 else -1
                    return [by[(pa, 1)], by[(pb, bs)], by[(pa, -1)], by[(pb, -bs)]]
                fl = [abs(midpoint_float(x)) for x in normal]
                g = [ivq(0)] * 3
                g[fl.index(min(fl))] = ivq(1)
                f1 = vcross(normal, g)
                f2 = vcross(normal, f1)
                ang = []
                for e, d in darts:
                    t = vscale(tang[edges[e][2]], d)
                    ang.append((iv.atan2(vdot(t, f2), vdot(t, f1)), (e, d)))
                    if hi(ang[-1][0]) - lo(ang[-1][0]) > 1:
                        ang[-1] = (iv.atan2(-vdot(t, f2), -vdot(t, f1)) + iv.pi, (e, d))
                ang.sort(key=lambda a: (lo(a[0]) + hi(a[0])) / 2)
                ok = all(hi(ang[i][0]) < lo(ang[i + 1][0]) for i in range(len(ang) - 1))
                ok = ok and hi(ang[-1][0]) < lo(ang[0][0] + 2 * iv.pi)
            if ok:
                return [d for _, d in ang]
        self.flags.add("undecided_signs", ["rotation", s, v])
        return None


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)
