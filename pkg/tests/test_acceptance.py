"""Acceptance criteria, each run at its stated tolerance and time limit.

Every test prints one ``PASS``/``FAIL`` line (visible in ``pytest -v`` output)
before asserting.
"""

import io
import json
import math
import random
import time
from contextlib import redirect_stderr, redirect_stdout

import pytest

from ballunion.claims import (HOLDS, ell_squared, gamma_angular_extent, gamma_ball_coverage,
                              gamma_trace, pk_h, pk_h_closed_form, sector_angle)
from ballunion.cli import main
from ballunion.complexity import (CERTIFIED_FULL, EXACT_SECTOR, count_boundary_features,
                                  count_construction, vertex_neighborhood_probe)
from ballunion.construction import ConstructionParams, build_family, origin_containment_check
from ballunion.geometry import Ball, Point3


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
        return passed
    return emit


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_criterion_1_exact_claims(report):
    t0 = time.perf_counter()
    code, out, _ = run_cli("verify", "--range", "4:200:2")
    elapsed = time.perf_counter() - t0
    reps = [json.loads(line) for line in out.splitlines()]
    ns = sorted({r["n"] for r in reps})
    ok = (code == 0 and ns == list(range(4, 201, 2)) and len(reps) == 2 * len(ns)
          and all(r["verdict"] == HOLDS for r in reps) and elapsed < 10)
    report(1, ok, f"verify --range 4:200:2 -> {sum(r['verdict'] == HOLDS for r in reps)}/{len(reps)} "
                  f"holds, exit {code}, {elapsed:.2f}s (< 10s)")
    assert ok


def test_criterion_2_closed_forms(report):
    t0 = time.perf_counter()
    pk_bad = [n for n in range(4, 201, 2) if pk_h(ConstructionParams(n // 2, n // 2)) != pk_h_closed_form(n)]
    ell_bad = [n for n in range(2, 201)
               if ell_squared(n) * n ** 8 != 2 * n ** 6 + 3 * n ** 4 - 4 * n ** 2 - 4]
    elapsed = time.perf_counter() - t0
    ok = not pk_bad and not ell_bad and elapsed < 5
    report(2, ok, f"pk_h closed form mismatches {pk_bad}, ell^2 identity mismatches {ell_bad}, "
                  f"{elapsed:.2f}s (< 5s)")
    assert ok


def test_criterion_3_quadratic_growth(report, tmp_path):
    path = tmp_path / "sweep.csv"
    t0 = time.perf_counter()
    code, out, _ = run_cli("sweep", "--n", "8,16,24,32,40", "--out", str(path))
    elapsed = time.perf_counter() - t0
    rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
    slope = float(out.strip().split("=")[1])
    bound_ok = all(int(r[3]) >= (int(r[0]) // 2) * (int(r[0]) // 2 - 1) for r in rows)
    ok = code == 0 and 1.8 <= slope <= 2.2 and bound_ok and len(rows) == 5 and elapsed < 300
    vs = ", ".join(f"V({r[0]})={r[3]}" for r in rows)
    report(3, ok, f"slope {slope:.4f} in [1.8, 2.2], {vs}, lower bound "
                  f"{'met' if bound_ok else 'violated'}, {elapsed:.1f}s (< 300s)")
    assert ok


def test_criterion_4_coverage_and_sector(report):
    t0 = time.perf_counter()
    details, ok = [], True
    for n in (8, 12, 16):
        p = ConstructionParams(n // 2, n // 2)
        trace = gamma_trace(p, 1)
        cover = gamma_ball_coverage(trace)
        ext = gamma_angular_extent(trace)
        below = ext.below(sector_angle(p.m))
        good = cover == set(range(1, p.k + 1)) and below is True
        ok &= good
        details.append(f"n={n}: coverage {'full' if cover == set(range(1, p.k + 1)) else sorted(cover)}, "
                       f"extent <= {float(ext.upper):.4f} vs 2pi/m = {2 * math.pi / p.m:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    report(4, ok, "; ".join(details) + f"; {elapsed:.1f}s (< 60s)")
    assert ok


def test_criterion_5_origin_containment(report):
    configs = [(k, m) for k in range(1, 21) for m in range(1, 21)]
    configs += [(n // 2, n // 2) for n in range(42, 201, 2)]
    failures = []
    worst = None
    for k, m in configs:
        rep = origin_containment_check(build_family(ConstructionParams(k, m)))
        low = min(rep.margins)
        worst = low if worst is None else min(worst, low)
        if not rep.passed or low <= 0:
            failures.append((k, m))
    ok = not failures
    report(5, ok, f"{len(configs)} configurations, smallest exact margin {worst} "
                  f"(~{float(worst):.6f}), failures {failures}")
    assert ok


def _euler_ok(rep):
    return all(e.passed for e in rep.euler) and rep.euler


def test_criterion_6_property_suite(report):
    checks = {}
    # known answers
    one = count_boundary_features([Ball(Point3(0, 0, 0))])
    two = count_boundary_features([Ball(Point3(0, 0, 0)), Ball(Point3(1, 0, 0))])
    three_balls = [Ball(Point3(0, 0, 0)), Ball(Point3(1, 0, 0)), Ball(Point3(0, 1, 0))]
    three = count_boundary_features(three_balls)
    checks["known answers"] = ((one.V, one.E, one.F), (two.V, two.E, two.F), (three.V, three.E, three.F)) == (
        (0, 0, 1), (0, 1, 2), (2, 3, 3))

    # mode agreement and Euler for every split with n <= 16
    agree, euler = True, True
    for n in range(2, 17):
        for k in range(1, n):
            p = ConstructionParams(k, n - k)
            a = count_construction(p, EXACT_SECTOR)
            if n <= 10 or k in (1, n // 2, n - 1):
                b = count_construction(p, CERTIFIED_FULL)
                agree &= a.authoritative and b.authoritative and (a.V, a.E, a.F) == (b.V, b.E, b.F)
                euler &= bool(_euler_ok(b))
            euler &= bool(_euler_ok(a))
    checks["mode agreement n<=16"] = agree
    checks["Euler on every sphere"] = euler

    # permutation invariance
    rng = random.Random(11)
    perm = True
    for km in [(2, 2), (3, 3), (4, 4), (2, 5)]:
        balls = build_family(ConstructionParams(*km)).balls()
        base = count_boundary_features(balls)
        shuffled = balls[:]
        rng.shuffle(shuffled)
        other = count_boundary_features(shuffled)
        perm &= (base.V, base.E, base.F) == (other.V, other.E, other.F)
    checks["permutation invariance"] = perm

    # rotational symmetry of per-ring counts
    rot = True
    for k, m in [(2, 3), (3, 4), (4, 4), (3, 6), (5, 5)]:
        rep = count_construction(ConstructionParams(k, m), CERTIFIED_FULL)
        rot &= len({(s["vertices"], s["arcs"], s["faces"]) for s in rep.per_sphere[k:]}) == 1
    checks["rotational symmetry"] = rot

    # classification vs neighborhood probe, every vertex, every split with n <= 8
    probe, nverts = True, 0
    for n in range(2, 9):
        for k in range(1, n):
            arr = count_construction(ConstructionParams(k, n - k), CERTIFIED_FULL).arrangement
            for vid, on in arr.boundary.items():
                nverts += 1
                probe &= vertex_neighborhood_probe(arr, vid, seed=vid) == on
    checks[f"probe agreement ({nverts} vertices)"] = probe

    ok = all(checks.values())
    report(6, ok, ", ".join(f"{name}: {'ok' if v else 'FAILED'}" for name, v in checks.items()))
    assert ok
