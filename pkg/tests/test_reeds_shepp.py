import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carplan.geometry import State, transform_state, wrap_angle
from carplan.reeds_shepp import rs_length, rs_sample, rs_shortest, rs_truncate_first
from oracles import rs_length_oracle

coord = st.floats(-15, 15, allow_nan=False)
angle = st.floats(-math.pi, math.pi, allow_nan=False)

# Frozen outputs of the word-enumeration oracle (tests/oracles.py).
FROZEN = [
    ((0, 0, 0), (0, 0, math.pi), 1.0, 3.1415926535897927),
    ((0, 0, 0), (10, 0, 0), 3.0, 10.0),
    ((0, 0, 0), (0, 5, 0), 3.0, 10.016646475856845),
    ((1, 2, 0.3), (-4, 7, -2.0), 3.0, 8.54436602015602),
    ((0, 0, 0), (-6, 0, 0), 3.0, 6.0),
]


@pytest.mark.parametrize("a,b,r,expected", FROZEN)
def test_frozen_oracle_values(a, b, r, expected):
    assert rs_length(State(*a), State(*b), r) == pytest.approx(expected, abs=1e-6)


def test_oracle_agreement_sample():
    rng = random.Random(5)
    for _ in range(25):
        a = (rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-math.pi, math.pi))
        b = (rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-math.pi, math.pi))
        assert rs_length(State(*a), State(*b), 3.0) == pytest.approx(rs_length_oracle(a, b, 3.0), abs=1e-6)


def test_identical_poses_have_zero_length():
    s = State(3, 4, 1)
    assert rs_length(s, s, 3.0) == 0.0


@given(coord, coord, angle, coord, coord, angle)
def test_length_at_least_euclidean(x0, y0, t0, x1, y1, t1):
    assert rs_length(State(x0, y0, t0), State(x1, y1, t1), 3.0) >= math.hypot(x1 - x0, y1 - y0) - 1e-9


@given(coord, coord, angle, coord, coord, angle)
def test_reversal_symmetry(x0, y0, t0, x1, y1, t1):
    a, b = State(x0, y0, t0), State(x1, y1, t1)
    assert rs_length(a, b, 3.0) == pytest.approx(rs_length(b, a, 3.0), abs=1e-9)


@given(coord, coord, angle, coord, coord, angle, st.floats(0.25, 4.0))
def test_scaling(x0, y0, t0, x1, y1, t1, k):
    a, b = State(x0, y0, t0), State(x1, y1, t1)
    sa, sb = State(k * x0, k * y0, t0), State(k * x1, k * y1, t1)
    assert rs_length(sa, sb, 3.0 * k) == pytest.approx(k * rs_length(a, b, 3.0), rel=1e-9, abs=1e-9)


@given(coord, coord, angle, coord, coord, angle, coord, coord, angle)
def test_rigid_motion_invariance(x0, y0, t0, x1, y1, t1, tx, ty, rot):
    a, b = State(x0, y0, t0), State(x1, y1, t1)
    ta, tb = transform_state(a, tx, ty, rot), transform_state(b, tx, ty, rot)
    assert rs_length(ta, tb, 3.0) == pytest.approx(rs_length(a, b, 3.0), abs=1e-7)


@given(coord, coord, angle, coord, coord, angle)
def test_path_reaches_goal(x0, y0, t0, x1, y1, t1):
    a, b = State(x0, y0, t0), State(x1, y1, t1)
    p = rs_shortest(a, b, 3.0)
    assert rs_sample(p, p.length).pose_error(b) < 1e-9
    assert rs_sample(p, 0.0).pose_error(a) < 1e-12
    assert p.length == pytest.approx(sum(s.length(3.0) for s in p.segments))


def test_sample_straight_path():
    p = rs_shortest(State(0, 0, 0), State(10, 0, 0), 3.0)
    s = rs_sample(p, 2.0995)
    assert (s.x, s.y, s.theta) == pytest.approx((2.0995, 0.0, 0.0))


def test_sampled_path_is_unit_speed():
    p = rs_shortest(State(0, 0, 0), State(2, 6, 2.0), 3.0)
    d = np.linspace(0, p.length, 2001)
    pts = p.sample_many(d)
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    ds = d[1] - d[0]
    # chords never exceed the arc; only chords across a cusp fall well short
    assert seg.max() <= ds * (1 + 1e-9)
    assert np.count_nonzero(seg < 0.99 * ds) <= 2


def test_truncate_clamps_at_goal():
    a, b = State(0, 0, 0), State(1.0, 0, 0)
    end, interior = rs_truncate_first(rs_shortest(a, b, 3.0), 2.0995, 5)
    assert end.pose_error(b) < 1e-12
    assert len(interior) == 7  # both endpoints plus five interior samples
    assert interior[0].pose_error(a) < 1e-12 and interior[-1].pose_error(b) < 1e-12


def test_in_place_rotation_word():
    p = rs_shortest(State(0, 0, 0), State(0, 0, math.pi), 1.0)
    assert p.length == pytest.approx(math.pi)
    assert abs(wrap_angle(rs_sample(p, p.length).theta - math.pi)) < 1e-9
