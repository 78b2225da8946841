import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carplan.geometry import CircleObstacle, DiscretizationParams, State, Workspace
from carplan.heuristics import (
    METRIC_RATIO,
    MOVES,
    CountTable,
    QWeights,
    build_holonomic_field,
    dist_h,
    q_value,
)
from carplan.reeds_shepp import rs_length

D = DiscretizationParams()


def around_disc(p, q, c, r):
    """Shortest planar path from p to q avoiding the open disc (c, r)."""
    p, q, c = np.asarray(p, float), np.asarray(q, float), np.asarray(c, float)
    d = q - p
    t = np.clip(np.dot(c - p, d) / max(np.dot(d, d), 1e-300), 0.0, 1.0)
    if np.linalg.norm(p + t * d - c) >= r:
        return float(np.linalg.norm(d))
    a, b = np.linalg.norm(p - c), np.linalg.norm(q - c)
    ang = math.acos(np.clip(np.dot(p - c, q - c) / (a * b), -1.0, 1.0))
    arc = ang - math.acos(r / a) - math.acos(r / b)
    return math.sqrt(a * a - r * r) + math.sqrt(b * b - r * r) + r * max(arc, 0.0)


def test_stencil_and_ratio():
    assert len(MOVES) == 32
    assert METRIC_RATIO == pytest.approx(1.0 / math.cos(0.5 * math.atan(1 / 3)))
    # no two neighbouring move directions are more than atan(1/3) apart
    angs = sorted(math.atan2(dy, dx) for dx, dy in MOVES)
    gaps = np.diff(angs + [angs[0] + 2 * math.pi])
    assert gaps.max() == pytest.approx(math.atan(1 / 3))


def test_straight_row_cost():
    f = build_holonomic_field(State(10.5, 10.5, 0), Workspace(40, 40))
    assert f.costs[20, 10] == pytest.approx(10.0)
    assert f.costs[10, 10] == 0.0


@given(st.floats(0.5, 39.5), st.floats(0.5, 39.5))
def test_open_field_is_lower_bound(x, y):
    g = State(20.3, 19.7, 0)
    f = build_holonomic_field(g, Workspace(40, 40))
    v = State(x, y, 0)
    eu = math.hypot(x - g.x, y - g.y)
    assert f.lookup(v) <= eu + 1e-9
    assert f.lookup(v) >= eu / METRIC_RATIO - 3.0


GOALS = [(33.2, 21.4), (30.5, 26.5), (20.0, 31.0)]


@given(st.floats(0.5, 39.5), st.floats(0.5, 39.5), st.floats(1.5, 8.0), st.sampled_from(GOALS))
def test_disc_field_below_geodesic(x, y, r, gxy):
    c = (20.0, 20.0)
    ws = Workspace(40, 40, (CircleObstacle(*c, r),))
    g = State(*gxy, 0)
    f = build_holonomic_field(g, ws)
    if math.hypot(x - c[0], y - c[1]) <= r:
        return
    h = f.lookup(State(x, y, 0))
    assert h <= around_disc((x, y), (g.x, g.y), c, r) + 1e-9


def test_disc_field_sees_the_detour():
    ws = Workspace(40, 40, (CircleObstacle(20, 20, 6),))
    g = State(33.5, 20.5, 0)
    f = build_holonomic_field(g, ws)
    v = State(6.5, 20.5, 0)
    true = around_disc((v.x, v.y), (g.x, g.y), (20, 20), 6)
    assert true > 27.0
    assert 27.0 < f.lookup(v) <= true


def test_goal_inside_obstacle_rejected():
    ws = Workspace(40, 40, (CircleObstacle(20, 20, 3),))
    with pytest.raises(ValueError):
        build_holonomic_field(State(20, 21, 0), ws)
    with pytest.raises(ValueError):
        build_holonomic_field(State(41, 20, 0), ws)


def test_dist_h_in_place_rotation():
    v, g = State(0, 0, 0), State(0, 0, math.pi)
    assert dist_h(v, g, None, 3.0) == pytest.approx(rs_length(v, g, 3.0))
    assert dist_h(v, g, None, 3.0) > 0


@given(st.floats(1, 39), st.floats(1, 39), st.floats(-3, 3))
def test_dist_h_dominates_components(x, y, th):
    g = State(20.5, 20.5, 1.0)
    f = build_holonomic_field(g, Workspace(40, 40))
    v = State(x, y, th)
    h = dist_h(v, g, f, 3.0)
    assert h >= rs_length(v, g, 3.0) and h >= f.lookup(v) and h >= math.hypot(x - g.x, y - g.y)


def test_count_table():
    t = CountTable()
    a = State(1.0, 1.0, 0.0)
    t.visit(a, D)
    t.visit(State(1.9, 1.5, 0.1), D)  # same cell
    assert t.get(a, D) == 2 and len(t) == 1
    t.clear()
    assert t.get(a, D) == 0


def test_q_value_example():
    w = QWeights()
    assert q_value(None, 2.0995, False, False, 10.0, 1, w) == pytest.approx(-11.2597, abs=1e-4)
    # greedy bonus cancels the cost term; goal candidates ignore visits
    assert q_value(None, 2.0995, True, True, 10.0, 7, w) == pytest.approx(-10.0)


def test_qweights_validation():
    with pytest.raises(ValueError):
        QWeights(lam=-0.1)
    assert QWeights(alpha_scale=0.0).alpha(2.0) == 0.0
