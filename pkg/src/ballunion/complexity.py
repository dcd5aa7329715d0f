"""Union-boundary feature counts, construction counting modes, growth sweeps and
sampling oracles used to cross-check the counts.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arrangement import Arrangement, CPoint, EulerResult, RingSymmetry, point_ball_sign
from .balls import BallLike, center_floats, center_iv
from .certified import PrecisionPolicy, default_policy, ivq, midpoint_float, workprec
from .construction import BallFamily, ConstructionParams, build_family
from .geometry import ExtPoint, Sign, vdot, vsub

EXACT_SECTOR = "exact-sector"
CERTIFIED_FULL = "certified-full"
MODES = (EXACT_SECTOR, CERTIFIED_FULL)


class EulerCheckFailed(RuntimeError):
    pass


@dataclass
class ComplexityReport:
    V: int
    E: int
    F: int
    mode: str
    per_sphere: list[dict]
    flags: dict
    resolved: dict
    euler: list[EulerResult] = field(default_factory=list)
    arrangement: Optional[Arrangement] = field(default=None, repr=False, compare=False)

    @property
    def authoritative(self) -> bool:
        return not any(self.flags.values())

    def to_dict(self) -> dict:
        return {
            "V": self.V, "E": self.E, "F": self.F,
            "mode": self.mode,
            "authoritative": self.authoritative,
            "flags": self.flags,
            "resolved_degeneracies": {k: len(v) for k, v in sorted(self.resolved.items())},
            "per_sphere": self.per_sphere,
            "euler": [e.to_dict() for e in self.euler],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def euler_check(arr: Arrangement, strict: bool = True) -> list[EulerResult]:
    """Euler identity on every representative sphere's full circle arrangement.

    Each connected component must satisfy ``V - E + F = 2``.  A genuine
    failure means the counting is wrong and raises when ``strict``; a rotation
    left undecided at the precision ceiling is flagged instead.
    """
    results = [arr.euler(s) for s in arr.rep_spheres()]
    bad = [r.sphere for r in results if not r.passed and not r.skipped]
    for r in results:
        if r.skipped == "undecided rotation":
            arr.flags.add("undecided_rotation", r.sphere)
    if bad:
        arr.flags.add("euler_failures", bad)
        if strict:
            raise EulerCheckFailed(f"Euler identity fails on spheres {bad}")
    return results


def _report(arr: Arrangement, mode: str, check_euler: bool) -> ComplexityReport:
    euler = euler_check(arr) if check_euler else []
    return ComplexityReport(
        arr.vertex_count, arr.edge_count, arr.face_count, mode,
        [arr.sphere_summary(i) for i in range(arr.n)],
        {k: v for k, v in sorted(arr.flags.entries.items()) if v},
        dict(arr.flags.resolved), euler, arr)


def count_boundary_features(balls: Sequence[BallLike], policy: Optional[PrecisionPolicy] = None,
                            check_euler: bool = True) -> ComplexityReport:
    """Vertices, arcs and faces of the boundary of the union of ``balls``."""
    arr = Arrangement(balls, policy=policy).build()
    return _report(arr, CERTIFIED_FULL, check_euler)


def count_construction(params, mode: str = EXACT_SECTOR,
                       policy: Optional[PrecisionPolicy] = None,
                       check_euler: bool = True) -> ComplexityReport:
    """Count the construction's boundary features.

    ``params`` is a :class:`ConstructionParams` or an already built
    :class:`BallFamily`.  ``exact-sector`` computes one representative per
    rotation orbit (the chain with the seed ring ball is exact) and replicates
    it; ``certified-full`` evaluates every triple and arc directly.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    fam = params if isinstance(params, BallFamily) else build_family(params)
    k, m = fam.k, fam.m
    sym = None
    if mode == EXACT_SECTOR:
        if list(fam.ring_angles) != [(j, m) for j in range(m)]:
            raise ValueError("exact-sector mode needs ring angles 2*pi*j/m for j = 0..m-1")
        sym = RingSymmetry(m, list(range(k, k + m)))
    arr = Arrangement(fam.balls(), sym, policy).build()
    return _report(arr, mode, check_euler)


@dataclass
class TripleClassification:
    on_boundary: bool
    flags: list[str] = field(default_factory=list)


def classify_triple_point(p, defining: Sequence[int], balls: Sequence[BallLike],
                          policy: Optional[PrecisionPolicy] = None) -> TripleClassification:
    """Is the triple point ``p`` outside every non-defining ball?

    Undecided signs are flagged and treated as boundary.
    """
    policy = policy or default_policy()
    if isinstance(p, ExtPoint):
        p = CPoint(p)
    out = TripleClassification(True)
    skip = set(defining)
    for i, ball in enumerate(balls):
        if i in skip:
            continue
        s = point_ball_sign(p, ball, policy)
        if s is Sign.INSIDE:
            out.on_boundary = False
            return out
        if s is None:
            out.flags.append(f"undecided sign against ball {i}")
        elif s is Sign.ON_BOUNDARY:
            out.flags.append(f"on the sphere of non-defining ball {i}")
    return out


# -- growth sweep --

@dataclass
class SweepRow:
    n: int
    k: int
    m: int
    V: int
    E: int
    F: int
    seconds: float
    authoritative: bool = True

    def csv(self) -> str:
        return f"{self.n},{self.k},{self.m},{self.V},{self.E},{self.F},{self.seconds:.3f}"


@dataclass
class SweepResult:
    rows: list[SweepRow]
    slope: Optional[float]
    excluded: list[int]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,k,m,V,E,F,seconds\n")
        for r in self.rows:
            buf.write(r.csv() + "\n")
        return buf.getvalue()


def loglog_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    if len(ns) < 2:
        raise ValueError("a slope needs at least two points")
    return float(np.polyfit(np.log(ns), np.log(values), 1)[0])


def sweep(n_values: Sequence[int], mode: str = EXACT_SECTOR,
          policy: Optional[PrecisionPolicy] = None, check_euler: bool = True) -> SweepResult:
    """Count the balanced construction (k = m = n/2) for each n and fit log V against log n."""
    ns = list(n_values)
    if len(ns) < 2:
        raise ValueError("sweep needs at least two n values")
    for n in ns:
        if n < 2 or n % 2:
            raise ValueError(f"n must be even and at least 2 (got {n})")
    rows, excluded = [], []
    for n in ns:
        t0 = time.perf_counter()
        rep = count_construction(ConstructionParams(n // 2, n // 2), mode, policy, check_euler)
        rows.append(SweepRow(n, n // 2, n // 2, rep.V, rep.E, rep.F,
                             time.perf_counter() - t0, rep.authoritative))
        if not rep.authoritative:
            excluded.append(n)
    fit = [r for r in rows if r.authoritative and r.V > 0]
    slope = loglog_slope([r.n for r in fit], [r.V for r in fit]) if len(fit) >= 2 else None
    return SweepResult(rows, slope, excluded)


# -- sampling oracles --

@dataclass
class FaceProbe:
    index: int
    samples: int
    boundary: int

    @property
    def fraction(self) -> float:
        return self.boundary / self.samples

    def to_dict(self) -> dict:
        return {"index": self.index, "samples": self.samples, "boundary": self.boundary,
                "fraction": self.fraction}


def monte_carlo_face_probe(balls: Sequence[BallLike], samples_per_sphere: int = 4000,
                           seed: int = 0) -> list[FaceProbe]:
    """Uniform samples on each sphere, counted as boundary when outside all other balls."""
    if samples_per_sphere < 1000:
        raise ValueError("samples_per_sphere must be at least 1000")
    rng = np.random.default_rng(seed)
    centers = np.array([center_floats(b) for b in balls], dtype=float)
    radii = np.array([float(b.radius) for b in balls], dtype=float)
    out = []
    for i in range(len(balls)):
        d = rng.normal(size=(samples_per_sphere, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        pts = centers[i] + radii[i] * d
        others = [j for j in range(len(balls)) if j != i]
        if others:
            diff = pts[:, None, :] - centers[others][None, :, :]
            inside = (np.einsum("ijk,ijk->ij", diff, diff) < radii[others] ** 2).any(axis=1)
            count = int((~inside).sum())
        else:
            count = samples_per_sphere
        out.append(FaceProbe(i, samples_per_sphere, count))
    return out


def vertex_neighborhood_probe(arr: Arrangement, vid: int, samples: int = 4000,
                              seed: int = 0) -> bool:
    """Sample a small ball around a vertex; True when some sample lies outside every ball.

    The radius is half the distance to the nearest sphere not through the
    vertex, so only the spheres through it shape the neighborhood.  Offsets
    are applied to high-precision margins to keep float cancellation out.
    """
    p = arr.registry.points[vid]
    defining = arr.defining(vid)
    prec = arr.policy.start
    g, rel = [], []
    with workprec(prec):
        q = p.iv(prec)
        for i, ball in enumerate(arr.balls):
            d = vsub(q, center_iv(ball, prec))
            rel.append([midpoint_float(c) for c in d])
            g.append(0.0 if i in defining else midpoint_float(vdot(d, d) - ivq(ball.radius_sq)))
    rel = np.array(rel)
    g = np.array(g)
    radii = np.array([float(b.radius) for b in arr.balls])
    dist = np.linalg.norm(rel, axis=1)
    gap = [abs(g[i]) / (dist[i] + radii[i]) for i in range(arr.n) if i not in defining]
    eps = 0.5 * min(gap) if gap else 1e-3
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(samples, 3))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    w *= eps * rng.random(samples)[:, None] ** (1 / 3)
    vals = g[None, :] + 2 * w @ rel.T + np.einsum("ij,ij->i", w, w)[:, None]
    return bool((vals > 0).all(axis=1).any())


def boundary_vertex_ids(arr: Arrangement) -> list[int]:
    return [v for v, ok in sorted(arr.boundary.items()) if ok]

