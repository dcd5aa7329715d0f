import json
import math
from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from ballunion.certified import PrecisionPolicy, hi, lo
from ballunion.claims import (FAILS, HOLDS, NOT_APPLICABLE, ell_squared, ell_squared_closed_form,
                              gamma_angular_extent, gamma_ball_coverage, gamma_trace, pk_h,
                              pk_h_closed_form, sector_angle, sphere_residual, verify_claim1,
                              verify_claim2)
from ballunion.construction import ConstructionParams

from oracles import sym_ell_squared, sym_pk_h, sym_top_z


def P(k, m):
    return ConstructionParams(k, m)


def to_sym(q: F):
    return sp.Rational(q.numerator, q.denominator)


# -- formulas --

def test_pk_h_values():
    assert pk_h(P(2, 2)) == F(13553, 14336) and to_sym(pk_h(P(2, 2))) == sym_pk_h(2, 2)
    assert pk_h(P(3, 3)) == F(43181, 44064) and to_sym(pk_h(P(3, 3))) == sym_pk_h(3, 3)


def test_pk_h_guard():
    with pytest.raises(ValueError):
        pk_h(P(1, 1), x=0, z=0)


def test_pk_h_closed_form_values():
    assert pk_h_closed_form(4) == F(54212, 57344) == F(13553, 14336)
    assert pk_h_closed_form(6) == F(690896, 705024) == F(43181, 44064)
    assert pk_h_closed_form(2) < 1


def test_ell_squared_values():
    assert ell_squared(4) == F(8892, 65536) == F(2223, 16384) == to_sym_back(sym_ell_squared(4))
    assert ell_squared(2) == F(156, 256) == F(39, 64)
    assert math.sqrt(39) / 8 < 1


def to_sym_back(e):
    e = sp.nsimplify(e)
    return F(int(e.p), int(e.q))


@pytest.mark.parametrize("n", [2, 3, 5, 17, 64, 200])
def test_ell_squared_below_sector_width(n):
    assert ell_squared(n) < F(4, n * n)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 100).map(lambda h: 2 * h))
def test_closed_form_identity_even_n(n):
    assert pk_h(P(n // 2, n // 2)) == pk_h_closed_form(n)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 200))
def test_ell_squared_polynomial_identity(n):
    assert ell_squared(n) * n ** 8 == 2 * n ** 6 + 3 * n ** 4 - 4 * n ** 2 - 4
    assert ell_squared(n) == ell_squared_closed_form(n)


def test_margin_trend_is_logged_not_asserted():
    # 1 - pk_h shrinks with n for the balanced split; recorded as a diagnostic
    margins = [1 - pk_h(P(n // 2, n // 2)) for n in range(4, 41, 2)]
    assert all(m > 0 for m in margins)
    assert margins == sorted(margins, reverse=True)


# -- verdicts --

def test_claim1_two_by_two():
    rep = verify_claim1(P(2, 2))
    assert rep.verdict == HOLDS
    assert rep.witnesses["pk_h"] == "13553/14336"
    assert rep.witnesses["top_point_above_z_k"] is True
    # the exact top-point z agrees with an independent Lagrange computation
    a, rest = rep.witnesses["top_point_z"].split(" + ")
    coef, rad = rest[1:].split(")*sqrt(")
    ours = sp.Rational(a) + sp.Rational(coef) * sp.sqrt(sp.Rational(rad[:-1]))
    assert sp.simplify(ours - sym_top_z(2, 2)) == 0
    assert sp.N(ours, 30) > sp.Rational(1, 256)


def test_claim1_three_by_three():
    rep = verify_claim1(P(3, 3))
    assert rep.verdict == HOLDS and rep.witnesses["pk_h"] == "43181/44064"


def test_claim1_fails_with_bad_seed():
    # pk_h = 432409/327680 > 1, and the top point sits below z_k: both routes agree
    rep = verify_claim1(P(2, 2), x=F(1, 10), z=F(-1, 2))
    assert rep.verdict == FAILS and rep.note == ""
    assert rep.witnesses["top_point_above_z_k"] is False


def test_claim2_two_by_two():
    rep = verify_claim2(P(2, 2))
    assert rep.verdict == HOLDS
    assert rep.witnesses["ell_squared"] == "2223/16384"
    assert rep.witnesses["four_over_n_squared"] == "1/4"
    assert rep.witnesses["sin_squared_pi_over_m"] == "1"


def test_claim2_three_by_three_and_irrational_sine():
    assert verify_claim2(P(3, 3)).verdict == HOLDS
    rep = verify_claim2(P(5, 5))
    assert rep.verdict == HOLDS
    lo_s, hi_s = (float(v) for v in rep.witnesses["sin_squared_pi_over_m"])
    assert lo_s <= math.sin(math.pi / 5) ** 2 <= hi_s


def test_claim2_not_applicable_for_single_ring_ball():
    assert verify_claim2(P(2, 1)).verdict == NOT_APPLICABLE


def test_claim2_fails_when_crossing_too_wide():
    rep = verify_claim2(P(1, 30))
    assert rep.verdict == HOLDS
    # a seed far off the axis makes the crossing too wide: ell^2 = 3/4 > 1/4
    rep = verify_claim2(P(2, 2), x=F(1, 2), z=F(-1, 2))
    assert rep.verdict == FAILS


def test_claim2_undecided_never_passes():
    rep = verify_claim2(P(3, 3), policy=PrecisionPolicy(53, 53))
    assert rep.verdict in (HOLDS, "undecided")


def test_report_json_is_deterministic():
    a = verify_claim1(P(2, 2)).to_json()
    assert a == verify_claim1(P(2, 2)).to_json()
    assert json.loads(a)["verdict"] == "holds"


@pytest.mark.parametrize("n", range(4, 41, 2))
def test_claims_hold_for_balanced_split(n):
    assert verify_claim1(P(n // 2, n // 2)).verdict == HOLDS
    assert verify_claim2(P(n // 2, n // 2)).verdict == HOLDS


# -- curve tracing --

def _residuals_ok(trace, params):
    return all(lo(r) <= 0 <= hi(r) for r in sphere_residual(trace, params))


def test_trace_two_by_two():
    t = gamma_trace(P(2, 2), 1, sample_count=64)
    assert gamma_ball_coverage(t) == {1, 2}
    assert _residuals_ok(t, P(2, 2))
    ext = gamma_angular_extent(t)
    assert ext.below(sector_angle(2)) is True


def test_trace_single_chain_ball_is_full_circle():
    t = gamma_trace(P(1, 3), 1)
    assert t.arcs == 1
    assert gamma_ball_coverage(t) == {1}
    ext = gamma_angular_extent(t)
    assert ext.points == 0 and ext.upper == 0 and ext.note
    assert ext.to_dict()["extent"] == ["0", "0"]


def test_trace_four_by_four_coverage_and_sector():
    t = gamma_trace(P(4, 4), 1)
    assert gamma_ball_coverage(t) == {1, 2, 3, 4}
    ext = gamma_angular_extent(t)
    assert ext.below(sector_angle(4)) is True
    assert float(ext.upper) < math.pi / 2


def test_trace_tags_step_between_adjacent_spheres():
    t = gamma_trace(P(4, 4), 1)
    tags = t.tags + t.tags[:1]
    assert all(abs(a - b) <= 1 for a, b in zip(tags, tags[1:]))


def test_trace_rotational_consistency():
    p = P(4, 4)
    t1, t2 = gamma_trace(p, 1), gamma_trace(p, 2)
    assert len(t1.points) == len(t2.points) and t1.tags == t2.tags
    c, s = math.cos(2 * math.pi / 4), math.sin(2 * math.pi / 4)
    for (x, y, z), q in zip(t1.floats(), t2.floats()):
        r = (c * x - s * y, s * x + c * y, z)
        assert max(abs(a - b) for a, b in zip(r, q)) < 1e-12
    e1, e2 = gamma_angular_extent(t1), gamma_angular_extent(t2)
    assert abs(e1.upper - e2.upper) < mpf(10) ** -25


def test_trace_rejects_bad_ring_index():
    with pytest.raises(ValueError):
        gamma_trace(P(2, 2), 3)


def test_trace_obj_is_closed_polyline():
    t = gamma_trace(P(2, 2), 1)
    lines = t.to_obj().splitlines()
    assert lines[-1].startswith("l 1 ") and lines[-1].endswith(" 1")
    assert sum(1 for ln in lines if ln.startswith("v ")) == len(t.points)
