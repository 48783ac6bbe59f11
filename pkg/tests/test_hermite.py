import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import hermite_coeffs_dense, horner
from worstcase import hermite
from worstcase.errors import InvalidInputError, InvalidSegmentError
from worstcase.hermite import (
    Knot,
    PiecewiseObjective,
    QuinticSegment,
    check_knot_continuity,
    evaluate,
    prolongate,
    solve_hermite,
)

finite = st.floats(-10, 10, allow_nan=False)
lengths = st.floats(1e-3, 5.0)

# eps = 0.25, alpha = 1, theta = 1: first segment of the general family
LEFT = (1.0, -0.5, 2.0)
RIGHT = (0.9375, -0.46875, 1.7578125)


def test_identical_end_data_gives_zero_polynomial():
    seg = solve_hermite((1, 0, 0), (1, 0, 0), 1.0)
    assert seg.coeffs == (0, 0, 0, 0, 0, 0)
    assert seg.base == 1.0


def test_family_segment_coefficients():
    seg = solve_hermite(LEFT, RIGHT, 0.25)
    dense = hermite_coeffs_dense((LEFT[0] - RIGHT[0], LEFT[1], LEFT[2]), (0.0, RIGHT[1], RIGHT[2]), 0.25)
    np.testing.assert_allclose(seg.coeffs, dense, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(seg.coeffs, [0.0625, -0.5, 1.0, 29.515625, -206.125, 352.25], rtol=1e-12)


def test_sd_segment_low_order_coefficients():
    seg = solve_hermite((1.0, -0.2, 0.0), (0.995, -0.199, 0.0), 0.05)
    assert seg.coeffs[0] == pytest.approx(0.005, rel=1e-12)
    assert seg.coeffs[1] == -0.2
    assert seg.coeffs[2] == 0.0
    dense = hermite_coeffs_dense((0.005, -0.2, 0.0), (0.0, -0.199, 0.0), 0.05)
    np.testing.assert_allclose(seg.coeffs[3:], dense[3:], rtol=1e-9)


@given(finite, finite, finite, finite, finite, finite, lengths)
def test_interpolation_conditions(f0, g0, h0, f1, g1, h1, s):
    seg = solve_hermite((f0, g0, h0), (f1, g1, h1), s)
    c = seg.coeffs
    assert c[0] == f0 - f1 and c[1] == g0 and c[2] == 0.5 * h0
    for order, want in enumerate((f1, g1, h1)):
        got = seg(s, order)
        # size of the largest term of the derivative polynomial at s
        terms = [abs(ci) * math.perm(i, order) * s ** (i - order) for i, ci in enumerate(c) if i >= order]
        scale = max(1.0, abs(want), *terms)
        assert abs(got - want) <= 1e-10 * scale


@given(finite, finite, finite, finite, finite, finite, st.floats(0.05, 3.0))
def test_matches_dense_solve(f0, g0, h0, f1, g1, h1, s):
    seg = solve_hermite((f0, g0, h0), (f1, g1, h1), s)
    dense = hermite_coeffs_dense((f0 - f1, g0, h0), (0.0, g1, h1), s)
    scale = max(1.0, np.max(np.abs(dense)))
    np.testing.assert_allclose(seg.coeffs, dense, atol=1e-9 * scale, rtol=0)


def test_bad_length_rejected():
    with pytest.raises(InvalidSegmentError):
        solve_hermite(LEFT, RIGHT, 0.0)
    with pytest.raises(InvalidInputError):
        solve_hermite(LEFT, (1.0, math.nan, 0.0), 0.5)


def small_objective():
    core = [Knot(0.0, *LEFT), Knot(0.25, *RIGHT)]
    return PiecewiseObjective.from_knots(prolongate(core))


def test_evaluation_at_knots_and_tails():
    obj = small_objective()
    assert obj.value(0.0) == 1.0
    assert obj.value(0.25) == 0.9375
    assert obj.gradient(-5.0) == 0.0
    assert obj.value(-5.0) == 1.0
    assert obj.value(10.0) == 0.9375
    assert evaluate(obj, 10.0, 2) == 0.0


def test_midpoint_matches_horner():
    obj = small_objective()
    coeffs = [0.0625, -0.5, 1.0, 29.515625, -206.125, 352.25]
    want = horner(coeffs, 0.125) + 0.9375
    assert obj.value(0.125) == pytest.approx(want, rel=1e-14)


def test_continuity_passes_and_detects_perturbation():
    obj = small_objective()
    assert check_knot_continuity(obj).passed
    segs = list(obj.segments)
    bad = list(segs[1].coeffs)
    bad[3] += 1e-3
    segs[1] = QuinticSegment(tuple(bad), segs[1].length, segs[1].base)
    broken = PiecewiseObjective(obj.knots, tuple(segs), obj.left_tail, obj.right_tail)
    rep = check_knot_continuity(broken)
    assert not rep.passed
    assert rep.worst_knot == 2


def test_two_dimensional_continuity_checks_partner():
    x = small_objective()
    y = PiecewiseObjective.from_knots(prolongate([Knot(0.0, 1.0, -0.02, 0.04), Knot(0.5, 0.99, -0.0198, 0.0392)]))
    obj = PiecewiseObjective(x.knots, x.segments, x.left_tail, x.right_tail, partner=y)
    rep = check_knot_continuity(obj)
    assert rep.passed and rep.partner is not None and rep.partner.passed
    assert obj.value([0.0, 0.0]) == 2.0
    np.testing.assert_array_equal(obj.gradient([0.0, 0.0]), [-0.5, -0.02])


def test_serialization_round_trip_is_bit_exact(tmp_path):
    obj = small_objective()
    path = tmp_path / "fn.json"
    hermite.save(obj, path)
    back = hermite.load(path)
    assert back.knots == obj.knots
    assert back.segments == obj.segments
    assert hermite.dumps(back) == hermite.dumps(obj)


def test_malformed_document_rejected():
    with pytest.raises(InvalidInputError):
        hermite.loads('{"knots": []}')


def test_derivative_snapping_only_near_knots():
    obj = small_objective()
    assert obj.gradient(0.25 * (1 + 1e-13)) == obj.gradient(0.25)
    raw = PiecewiseObjective(obj.knots, obj.segments, obj.left_tail, obj.right_tail, snap_tol=0.0)
    assert raw.value(0.2) == obj.value(0.2)
    assert raw.gradient(0.2) == obj.gradient(0.2)
