import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from ballunion.balls import RotatedBall, center_iv
from ballunion.certified import hi, ivq, lo, rotate_iv, workprec
from ballunion.construction import (BallFamily, ConstructionParams, InvalidParameters, build_family,
                                    chain_structure_check, min_pairwise_center_distance,
                                    origin_containment_check)
from ballunion.geometry import Ball, Point3


def fam(k, m):
    return build_family(ConstructionParams(k, m))


def test_two_by_two_family():
    f = fam(2, 2)
    assert [b.center for b in f.chain] == [Point3(0, 0, 0), Point3(0, 0, F(1, 256))]
    assert f.ring_seed.center == Point3(F(7, 64), 0, -F(7, 16))
    assert f.ring_angles == ((0, 2), (1, 2))
    assert all(b.radius == 1 for b in f.balls())


def test_one_by_three_family_shares_n_four_seed():
    f = fam(1, 3)
    assert [b.center for b in f.chain] == [Point3(0, 0, 0)]
    assert f.ring_seed.center == Point3(F(28, 256), 0, -F(7, 16))
    assert len(f.ring_angles) == 3


@pytest.mark.parametrize("k, m, msg", [(0, 2, "k must be ≥ 1"), (2, 0, "m must be ≥ 1")])
def test_invalid_params(k, m, msg):
    with pytest.raises(InvalidParameters, match=msg):
        ConstructionParams(k, m)


def test_seed_override():
    f = build_family(ConstructionParams(2, 2), x=F(1, 10), z="-1/3")
    assert f.ring_seed.center == Point3(F(1, 10), 0, -F(1, 3))


def test_json_round_trip_and_format():
    f = fam(2, 2)
    text = f.to_json()
    assert text.startswith('{"k":2,"m":2,"chain":[{"center":["0","0","0"],"r":"1"}')
    assert '"ring_angles":[[0,2],[1,2]]' in text
    assert BallFamily.from_json(text) == f
    assert build_family(ConstructionParams(2, 2)).to_json() == text


def test_origin_containment_two_by_two():
    rep = origin_containment_check(fam(2, 2))
    assert rep.passed
    assert rep.margins[0] == 1
    assert rep.margins[1] == 1 - F(1, 256) ** 2
    assert rep.margins[2:] == [1 - F(13328, 65536)] * 2 == [F(52208, 65536)] * 2


def test_origin_containment_small_and_single():
    assert origin_containment_check(fam(1, 3)).passed
    assert origin_containment_check(fam(1, 3)).margins[0] == 1


def test_min_distance_chain_spacing():
    d = min_pairwise_center_distance(fam(2, 2))
    assert d.value == F(1, 256) ** 2 and d.pair == (0, 1)


def test_min_distance_one_by_two_brute_force():
    f = fam(1, 2)
    # n = 3: seed (14/81, 0, -14/27); pairs are chain-ring (|R|^2) and the two ring balls (4x^2)
    x, z = F(14, 81), -F(14, 27)
    expected = min(x * x + z * z, 4 * x * x)
    d = min_pairwise_center_distance(f)
    assert d.value == expected == F(784, 6561)
    assert d.pair == (1, 2)


def test_min_distance_irrational_ring():
    # k = 1, m = 9: the closest pair is two adjacent ring balls, an irrational distance
    d = min_pairwise_center_distance(fam(1, 9))
    assert d.value is None and d.note == ""
    x = F(2 * 100 - 4, 10 ** 4)
    approx = (2 * float(x) * math.sin(math.pi / 9)) ** 2
    assert float(lo(d.interval)) <= approx * (1 + 1e-12) and float(hi(d.interval)) >= approx * (1 - 1e-12)


def test_min_distance_no_pairs():
    d = min_pairwise_center_distance([Ball(Point3(0, 0, 0))])
    assert d.value is None and d.note == "no pairs"


def test_chain_structure_two_by_two():
    rep = chain_structure_check(fam(2, 2))
    assert rep.passed and rep.circle_heights == [F(1, 512)]


def test_chain_structure_vacuous():
    rep = chain_structure_check(fam(1, 3))
    assert rep.passed and rep.circle_heights == []


def test_chain_structure_detects_disjoint_chain():
    f = fam(2, 2)
    bad = BallFamily(f.params, (Ball(Point3(0, 0, 0)), Ball(Point3(0, 0, 3))), f.ring_seed, f.ring_angles)
    rep = chain_structure_check(bad)
    assert not rep.passed and rep.failures[0][0] == 1


params = st.builds(ConstructionParams, st.integers(1, 40), st.integers(1, 40))


@settings(max_examples=80, deadline=None)
@given(params)
def test_origin_always_inside(p):
    assert origin_containment_check(build_family(p)).passed


@settings(max_examples=40, deadline=None)
@given(params)
def test_chain_gap_constant_and_deterministic(p):
    f = build_family(p)
    zs = [b.center.z for b in f.chain]
    assert all(b - a == F(1, p.n ** 4) for a, b in zip(zs, zs[1:]))
    assert build_family(p).to_json() == f.to_json()
    assert chain_structure_check(f).passed


@settings(max_examples=40, deadline=None)
@given(params, st.sampled_from([64, 128, 256]))
def test_ring_rotation_back_to_seed(p, prec):
    f = build_family(p)
    seed = [F(v) for v in f.ring_seed.center]
    for j in range(p.m):
        c = center_iv(RotatedBall(f.ring_seed, j, p.m), prec)
        with workprec(prec):
            back = rotate_iv(c, -j, p.m, prec)
            for b, s in zip(back, seed):
                q = ivq(s)
                assert lo(b) <= hi(q) and lo(q) <= hi(b)
                assert hi(b) - lo(b) < mpf(2) ** (-prec + 12)
