"""Discrete-time motion primitives of an Ackermann robot and their costs.

Every step lasts ``dt`` seconds.  The six moving primitives drive at full speed
``u_m`` with the steering either straight or at the planning turn radius
``r_m``; WAIT stays put.  GM (greedy) and RS (a piece of an analytic
Reeds-Shepp completion inside hybrid A*) are free-form steps whose motion is
the shortest Reeds-Shepp curve between their endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from . import _kernels as K
from .geometry import (
    DiscretizationParams,
    RobotShape,
    State,
    Workspace,
    obstacle_array,
)
from .reeds_shepp import rs_shortest

DEFAULT_DTHETA = math.radians(40.1)


class Primitive(Enum):
    FL = "FL"
    FS = "FS"
    FR = "FR"
    BL = "BL"
    BS = "BS"
    BR = "BR"
    WAIT = "WAIT"
    GM = "GM"
    RS = "RS"

    @property
    def direction(self) -> int:
        return _DIRECTION[self]

    @property
    def steer(self) -> int:
        return _STEER[self]

    @property
    def is_moving(self) -> bool:
        return self in MOVING

    @property
    def is_arc(self) -> bool:
        return self.is_moving and self.steer != 0

    @property
    def is_backward(self) -> bool:
        return self.direction < 0

    @property
    def order(self) -> int:
        """Position in the deterministic tie-break order FL<FS<FR<BL<BS<BR<WAIT<GM<RS."""
        return _ORDER[self]


MOVING = (Primitive.FL, Primitive.FS, Primitive.FR, Primitive.BL, Primitive.BS, Primitive.BR)
UNIVERSAL = MOVING + (Primitive.WAIT,)
_ORDER = {p: i for i, p in enumerate(Primitive)}
_DIRECTION = {p: (1 if p.value[0] == "F" else -1) if p in MOVING else 0 for p in Primitive}
_STEER = {p: {"L": 1, "S": 0, "R": -1}[p.value[1]] if p in MOVING else 0 for p in Primitive}


@dataclass(frozen=True)
class KinematicParams:
    """Ackermann limits and the step duration.

    ``dt`` defaults to ``r_m * dtheta / u_m`` so that a turning primitive
    changes the heading by exactly one discretization step.
    """

    u_m: float = 2.0
    phi_m: float = DEFAULT_DTHETA
    r_m: float = 3.0
    dt: float | None = None

    def __post_init__(self) -> None:
        if min(self.u_m, self.phi_m, self.r_m) <= 0:
            raise ValueError("kinematic parameters must be positive")
        if self.dt is None:
            object.__setattr__(self, "dt", self.r_m * DEFAULT_DTHETA / self.u_m)
        if self.dt <= 0:
            raise ValueError("kinematic parameters must be positive")

    @classmethod
    def derived(cls, u_m: float, phi_m: float, r_m: float, dtheta: float) -> "KinematicParams":
        return cls(u_m, phi_m, r_m, r_m * dtheta / u_m)

    @property
    def step_len(self) -> float:
        """Arc length travelled by one moving primitive, ``u_m * dt``."""
        return self.u_m * self.dt

    @property
    def dtheta_arc(self) -> float:
        return self.step_len / self.r_m


@dataclass(frozen=True)
class CostParams:
    c_turn: float = 1.5
    c_rev: float = 2.0
    c_switch: float = 1.0
    c_wait: float = 1.0


@dataclass(frozen=True, eq=False)
class Step:
    """One timestep of motion; ``samples`` (k, 3) include both endpoints."""

    primitive: Primitive
    start: State
    end: State
    samples: np.ndarray
    arc_len: float

    def __repr__(self) -> str:
        return f"Step({self.primitive.value}, {self.start.as_tuple()} -> {self.end.as_tuple()}, len={self.arc_len:.6g})"


@dataclass
class Trajectory:
    robot: int
    start: State
    steps: list[Step] = field(default_factory=list)

    @property
    def states(self) -> list[State]:
        return [self.start] + [s.end for s in self.steps]

    @property
    def final(self) -> State:
        return self.steps[-1].end if self.steps else self.start

    @property
    def arc_length(self) -> float:
        return float(sum(s.arc_len for s in self.steps))

    def __len__(self) -> int:
        return len(self.steps)


def apply_primitive(s: State, p: Primitive, k: KinematicParams) -> State:
    """Closed-form integration of the bicycle model at constant controls."""
    if p is Primitive.WAIT:
        return s
    if not p.is_moving:
        raise ValueError(f"{p.value} has no fixed control")
    x, y, th = K.primitive_pose(s.x, s.y, s.theta, p.direction, p.steer, k.step_len, k.r_m)
    return State(x, y, th)


def primitive_samples(s: State, p: Primitive, k: KinematicParams, n_sub: int = 5) -> np.ndarray:
    if p is Primitive.WAIT:
        return np.tile(np.array(s.as_tuple()), (n_sub + 2, 1))
    if not p.is_moving:
        raise ValueError(f"{p.value} has no fixed control")
    return K.primitive_samples(s.x, s.y, s.theta, p.direction, p.steer, k.step_len, k.r_m, n_sub)


def make_step(s: State, p: Primitive, k: KinematicParams, n_sub: int = 5) -> Step:
    smp = primitive_samples(s, p, k, n_sub)
    end = apply_primitive(s, p, k)
    return Step(p, s, end, smp, 0.0 if p is Primitive.WAIT else k.step_len)


def connect_motion(frm: State, to: State, k: KinematicParams, n_sub: int = 5) -> tuple[np.ndarray, float]:
    """Swept samples and arc length of a free-form (GM/RS) step.

    If ``to`` is some moving primitive's successor of ``frm`` (within 1e-9) the
    step is that primitive's arc; otherwise it is the shortest Reeds-Shepp
    curve.  Planners and the validator both derive GM/RS motion through this
    function, so they check exactly the same swept poses.
    """
    if frm.pose_error(to) < 1e-9:
        return np.tile(np.array(frm.as_tuple()), (n_sub + 2, 1)), 0.0
    for p in MOVING:
        if apply_primitive(frm, p, k).pose_error(to) < 1e-9:
            smp = primitive_samples(frm, p, k, n_sub)
            smp[-1] = to.as_tuple()
            return smp, k.step_len
    path = rs_shortest(frm, to, k.r_m)
    total = path.length
    smp = path.sample_many(np.linspace(0.0, total, n_sub + 2))
    smp[0] = frm.as_tuple()
    smp[-1] = to.as_tuple()
    return smp, total


def free_step(p: Primitive, frm: State, to: State, k: KinematicParams, n_sub: int = 5) -> Step:
    smp, length = connect_motion(frm, to, k, n_sub)
    return Step(p, frm, to, smp, length)


def primitive_cost(prev: Primitive | None, p: Primitive, arc_len: float, k: KinematicParams, c: CostParams = CostParams()) -> float:
    """Step cost with turn, reverse and direction-switch penalties.

    Free-form steps (GM, RS) cost their arc length; a zero-length one costs
    like WAIT so every step has positive cost.
    """
    if p is Primitive.WAIT or (not p.is_moving and arc_len <= 0.0):
        return c.c_wait * k.step_len
    if not p.is_moving:
        return arc_len
    cost = arc_len
    if p.is_arc:
        cost *= c.c_turn
    if p.is_backward:
        cost *= c.c_rev
    if prev is not None and prev.direction != 0 and prev.direction != p.direction:
        cost += c.c_switch * k.step_len
    return cost


@dataclass(frozen=True, eq=False)
class MotionModel:
    """Workspace, body and kinematics bundled with the arrays the kernels need."""

    ws: Workspace
    shape: RobotShape = RobotShape()
    kin: KinematicParams = KinematicParams()
    disc: DiscretizationParams = DiscretizationParams()
    costs: CostParams = CostParams()
    n_sub: int = 5

    @cached_property
    def obs(self) -> np.ndarray:
        return obstacle_array(self.ws.obstacles)

    @property
    def off(self) -> float:
        return self.shape.center_offset

    @property
    def hl(self) -> float:
        return 0.5 * self.shape.length

    @property
    def hw(self) -> float:
        return 0.5 * self.shape.width

    @cached_property
    def reach2(self) -> float:
        """Squared reference-point distance beyond which two bodies are disjoint."""
        return (2.0 * self.shape.circumradius) ** 2

    @cached_property
    def reach_step2(self) -> float:
        return (2.0 * self.shape.circumradius + 2.0 * self.kin.step_len) ** 2 + 1e-9

    @cached_property
    def neighbor_radius(self) -> float:
        return 2.0 * (self.kin.step_len + self.shape.circumradius)

    def pose_free(self, s: State) -> bool:
        return K.pose_static_free(s.x, s.y, s.theta, self.off, self.hl, self.hw, self.obs, self.ws.width, self.ws.height)

    def samples_free(self, smp: np.ndarray) -> bool:
        return K.samples_static_free(smp, self.off, self.hl, self.hw, self.obs, self.ws.width, self.ws.height)

    def successors(self, s: State) -> list[Step]:
        """Valid steps of the six moving primitives plus WAIT, in tag order."""
        smp, valid = K.expand_moving(
            s.x, s.y, s.theta, self.kin.step_len, self.kin.r_m, self.n_sub,
            self.off, self.hl, self.hw, self.obs, self.ws.width, self.ws.height,
        )
        out = []
        for i, p in enumerate(MOVING):
            if valid[i]:
                row = smp[i]
                out.append(Step(p, s, State(row[-1, 0], row[-1, 1], row[-1, 2]), row, self.kin.step_len))
        if self.pose_free(s):
            out.append(Step(Primitive.WAIT, s, s, np.tile(np.array(s.as_tuple()), (self.n_sub + 2, 1)), 0.0))
        return out

    def cost(self, prev: Primitive | None, step: Step) -> float:
        return primitive_cost(prev, step.primitive, step.arc_len, self.kin, self.costs)


def valid_succ_state(
    s: State, p: Primitive, ws: Workspace, shape: RobotShape, k: KinematicParams, n_sub: int = 5
) -> Step | None:
    """The Step for ``p`` if every sub-sampled footprint is free, else None."""
    step = make_step(s, p, k, n_sub)
    m = MotionModel(ws, shape, k, n_sub=n_sub)
    return step if m.samples_free(step.samples) else None

