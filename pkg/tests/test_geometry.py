import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carplan import _kernels as K
from carplan.geometry import (
    CircleObstacle,
    DiscreteState,
    DiscretizationParams,
    OrientedBox,
    RobotShape,
    State,
    Workspace,
    box_circle_intersect,
    box_is_free,
    boxes_intersect,
    discretize,
    footprint,
    transform_box,
    transform_state,
    wrap_angle,
)
from oracles import box_grid_points, boxes_overlap_sampled, point_in_box

coord = st.floats(-20, 20, allow_nan=False)
angle = st.floats(-10, 10, allow_nan=False)


def test_wrap_angle_range_and_pi():
    assert wrap_angle(math.pi) == -math.pi
    assert wrap_angle(-math.pi) == -math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    with pytest.raises(ValueError):
        wrap_angle(float("nan"))


@given(angle)
def test_wrap_angle_half_open(a):
    w = wrap_angle(a)
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)


def test_state_rejects_nonfinite_and_wraps():
    with pytest.raises(ValueError):
        State(float("inf"), 0, 0)
    s = State(np.float64(1.0), 2, 7.0)
    assert type(s.x) is float and type(s.y) is float
    assert s.theta == pytest.approx(7.0 - 2 * math.pi)


def test_shape_validation():
    with pytest.raises(ValueError):
        RobotShape(3, 2, 3)
    with pytest.raises(ValueError):
        RobotShape(3, 0, 2)


def test_footprint_at_origin():
    b = footprint(State(0, 0, 0), RobotShape(3, 2, 2))
    assert (b.cx, b.cy, b.half_length, b.half_width, b.heading) == (1.0, 0.0, 1.5, 1.0, 0.0)


def test_circumradius_reaches_the_front_corner():
    sh = RobotShape()
    corners = footprint(State(0, 0, 0.3), sh).corners()
    assert max(math.hypot(x, y) for x, y in corners) == pytest.approx(sh.circumradius)


def test_box_circle_touching_counts():
    box = OrientedBox(0, 0, 1.5, 1, 0)
    assert box_circle_intersect(box, CircleObstacle(2.5, 0, 1.0))
    assert not box_circle_intersect(box, CircleObstacle(2.5 + 1e-9, 0, 1.0))
    # sampling oracle: the touching point lies on the boundary of both sets
    X, Y = box_grid_points(box, 101)
    d = np.hypot(X - 2.5, Y)
    assert d.min() == pytest.approx(1.0)


def test_boxes_touching_edge_is_collision():
    a = OrientedBox(0, 0, 1, 1, 0)
    assert boxes_intersect(a, OrientedBox(2, 0, 1, 1, 0))
    assert not boxes_intersect(a, OrientedBox(2 + 1e-9, 0, 1, 1, 0))


@given(coord, coord, angle, coord, coord, angle)
def test_sat_agrees_with_dense_sampling(ax, ay, ath, bx, by, bth):
    a = OrientedBox(ax / 4, ay / 4, 1.5, 1.0, ath)
    b = OrientedBox(bx / 4, by / 4, 1.5, 1.0, bth)
    sat = boxes_intersect(a, b)
    if boxes_overlap_sampled(a, b, 60):
        assert sat
    if sat:
        grown = OrientedBox(a.cx, a.cy, 1.6, 1.1, a.heading)
        assert boxes_overlap_sampled(grown, b, 60)


@given(coord, coord, angle, coord, coord, angle)
def test_kernel_box_test_matches_python(ax, ay, ath, bx, by, bth):
    sh = RobotShape()
    s, t = State(ax / 4, ay / 4, ath), State(bx / 4, by / 4, bth)
    py = boxes_intersect(footprint(s, sh), footprint(t, sh))
    nb = K.box_box(s.x, s.y, s.theta, t.x, t.y, t.theta, sh.center_offset, 1.5, 1.0)
    assert py == bool(nb)


def test_box_is_free_boundary():
    ws = Workspace(10, 10)
    assert box_is_free(footprint(State(1, 1, 0), RobotShape()), ws)
    assert not box_is_free(footprint(State(7.6, 5, 0), RobotShape()), ws)  # front edge at 10.1


def test_workspace_rejects_outside_obstacle():
    with pytest.raises(ValueError):
        Workspace(10, 10, (CircleObstacle(11, 5, 1),))


def test_discretize_negative_heading():
    d = DiscretizationParams(2, 2, 0.6998)
    assert discretize(State(1.0, 1.0, -0.1), d) == DiscreteState(0, 0, -1)
    # exact rational check of the heading floor
    assert math.floor(Fraction(-0.1) / Fraction(0.6998)) == -1


@given(coord, coord, angle, coord, coord, angle)
def test_transform_commutes_with_footprint(x, y, th, tx, ty, rot):
    sh = RobotShape()
    s = State(x, y, th)
    a = transform_box(footprint(s, sh), tx, ty, rot)
    b = footprint(transform_state(s, tx, ty, rot), sh)
    assert a.cx == pytest.approx(b.cx, abs=1e-9)
    assert a.cy == pytest.approx(b.cy, abs=1e-9)
    assert abs(wrap_angle(a.heading - b.heading)) < 1e-9


def test_point_in_box_oracle_sanity():
    b = OrientedBox(0, 0, 1.5, 1, math.pi / 2)
    assert point_in_box(0, 1.4, b) and not point_in_box(1.4, 0, b)
