"""SE(2) states, robot footprints and the collision predicates used everywhere.

The pose reference point is the rear-axle midpoint; the body rectangle is
centred ``wheelbase / 2`` ahead of it along the heading.  All collision tests
treat shapes as closed sets, so touching counts as a collision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

PI = math.pi
TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap ``theta`` into the half-open interval [-pi, pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    a = (theta + PI) % TWO_PI - PI
    if a >= PI:
        a -= TWO_PI
    if a < -PI:
        a = -PI
    return a


@dataclass(frozen=True, slots=True)
class State:
    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite position ({self.x}, {self.y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def pose_error(self, other: "State") -> float:
        """Max of position distance and absolute wrapped heading difference."""
        dp = math.hypot(self.x - other.x, self.y - other.y)
        dth = abs(wrap_angle(self.theta - other.theta))
        return max(dp, dth)


@dataclass(frozen=True, slots=True)
class RobotShape:
    length: float = 3.0
    width: float = 2.0
    wheelbase: float = 2.0

    def __post_init__(self) -> None:
        if not (0.0 < self.wheelbase < self.length):
            raise ValueError("need 0 < wheelbase < length")
        if self.width <= 0.0:
            raise ValueError("width must be positive")

    @property
    def center_offset(self) -> float:
        return 0.5 * self.wheelbase

    @property
    def circumradius(self) -> float:
        """Largest distance from the rear-axle reference point to the body."""
        return math.hypot(self.center_offset + 0.5 * self.length, 0.5 * self.width)

    @property
    def box_radius(self) -> float:
        """Half diagonal of the body rectangle."""
        return math.hypot(0.5 * self.length, 0.5 * self.width)


@dataclass(frozen=True, slots=True)
class OrientedBox:
    cx: float
    cy: float
    half_length: float
    half_width: float
    heading: float

    def __post_init__(self) -> None:
        if self.half_length <= 0.0 or self.half_width <= 0.0:
            raise ValueError("box half extents must be positive")

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)

    def corners(self) -> list[tuple[float, float]]:
        c, s = math.cos(self.heading), math.sin(self.heading)
        out = []
        for a, b in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            lx, ly = a * self.half_length, b * self.half_width
            out.append((self.cx + c * lx - s * ly, self.cy + s * lx + c * ly))
        return out


@dataclass(frozen=True, slots=True)
class CircleObstacle:
    x: float
    y: float
    radius: float = 1.0

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("obstacle radius must be positive")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Workspace:
    width: float
    height: float
    obstacles: tuple[CircleObstacle, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("workspace dimensions must be positive")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for o in self.obstacles:
            if not (0.0 <= o.x <= self.width and 0.0 <= o.y <= self.height):
                raise ValueError(f"obstacle centre {o.center} outside the map")


@dataclass(frozen=True, slots=True)
class DiscretizationParams:
    dx: float = 2.0
    dy: float = 2.0
    dtheta: float = math.radians(40.1)

    def __post_init__(self) -> None:
        if min(self.dx, self.dy, self.dtheta) <= 0.0:
            raise ValueError("discretization steps must be positive")


@dataclass(frozen=True, slots=True, order=True)
class DiscreteState:
    ix: int
    iy: int
    itheta: int


def footprint(s: State, shape: RobotShape) -> OrientedBox:
    off = shape.center_offset
    c, sn = math.cos(s.theta), math.sin(s.theta)
    return OrientedBox(s.x + off * c, s.y + off * sn, 0.5 * shape.length, 0.5 * shape.width, s.theta)


def _axes(b: OrientedBox) -> tuple[tuple[float, float], tuple[float, float]]:
    c, s = math.cos(b.heading), math.sin(b.heading)
    return (c, s), (-s, c)


def boxes_intersect(a: OrientedBox, b: OrientedBox) -> bool:
    """Separating-axis test over the four edge normals (closed rectangles)."""
    dx, dy = b.cx - a.cx, b.cy - a.cy
    a_ax = _axes(a)
    b_ax = _axes(b)
    for ux, uy in a_ax + b_ax:
        ra = a.half_length * abs(a_ax[0][0] * ux + a_ax[0][1] * uy) + a.half_width * abs(
            a_ax[1][0] * ux + a_ax[1][1] * uy
        )
        rb = b.half_length * abs(b_ax[0][0] * ux + b_ax[0][1] * uy) + b.half_width * abs(
            b_ax[1][0] * ux + b_ax[1][1] * uy
        )
        if abs(dx * ux + dy * uy) > ra + rb:
            return False
    return True


def point_box_distance(px: float, py: float, b: OrientedBox) -> float:
    c, s = math.cos(b.heading), math.sin(b.heading)
    dx, dy = px - b.cx, py - b.cy
    lx, ly = c * dx + s * dy, -s * dx + c * dy
    qx = min(max(lx, -b.half_length), b.half_length)
    qy = min(max(ly, -b.half_width), b.half_width)
    return math.hypot(lx - qx, ly - qy)


def box_circle_intersect(a: OrientedBox, c: CircleObstacle) -> bool:
    return point_box_distance(c.x, c.y, a) <= c.radius


def in_workspace(a: OrientedBox, ws: Workspace) -> bool:
    return all(0.0 <= x <= ws.width and 0.0 <= y <= ws.height for x, y in a.corners())


def box_is_free(a: OrientedBox, ws: Workspace) -> bool:
    """In-bounds and clear of every obstacle disc."""
    return in_workspace(a, ws) and not any(box_circle_intersect(a, o) for o in ws.obstacles)


def discretize(s: State, d: DiscretizationParams) -> DiscreteState:
    return DiscreteState(
        math.floor(s.x / d.dx),
        math.floor(s.y / d.dy),
        math.floor(wrap_angle(s.theta) / d.dtheta),
    )


def transform_state(s: State, tx: float, ty: float, rot: float) -> State:
    """Rotate ``s`` about the origin by ``rot`` then translate by (tx, ty)."""
    c, sn = math.cos(rot), math.sin(rot)
    return State(c * s.x - sn * s.y + tx, sn * s.x + c * s.y + ty, s.theta + rot)


def transform_box(b: OrientedBox, tx: float, ty: float, rot: float) -> OrientedBox:
    c, sn = math.cos(rot), math.sin(rot)
    return OrientedBox(
        c * b.cx - sn * b.cy + tx, sn * b.cx + c * b.cy + ty, b.half_length, b.half_width, wrap_angle(b.heading + rot)
    )


def obstacle_array(obstacles: Sequence[CircleObstacle]):
    import numpy as np

    if not obstacles:
        return np.zeros((0, 3))
    return np.array([[o.x, o.y, o.radius] for o in obstacles], dtype=np.float64)
