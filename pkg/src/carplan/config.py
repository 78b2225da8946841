"""One flat configuration record holding every tunable and its default value.

Angles are stored in degrees, as in config and scenario files; the builder
methods convert to radians.  ``load_config`` reads a JSON object of overrides
from a path, or from ``$CARPLAN_CONFIG`` when no path is given.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass

from .eccr import EccrConfig
from .geometry import DiscretizationParams, RobotShape, Workspace
from .heuristics import QWeights
from .hybrid_astar import SearchConfig
from .pbcr import VARIANTS, PbcrConfig
from .primitives import CostParams, KinematicParams, MotionModel

ENV_VAR = "CARPLAN_CONFIG"


@dataclass(frozen=True)
class Config:
    # robot body
    robot_width: float = 2.0
    robot_length: float = 3.0
    wheelbase: float = 2.0
    # discretization
    dx: float = 2.0
    dy: float = 2.0
    dtheta_deg: float = 40.1
    # kinematics; dt None means r_m * dtheta / u_m
    u_m: float = 2.0
    phi_m_deg: float = 40.1
    r_m: float = 3.0
    dt: float | None = None
    n_sub: int = 5
    # step costs
    c_turn: float = 1.5
    c_rev: float = 2.0
    c_switch: float = 1.0
    c_wait: float = 1.0
    # Q-function
    lam: float = 0.3
    alpha_scale: float = 1.0
    beta_scale: float = 1.0
    v0_keeps_alpha: bool = True
    count_wait: bool = True
    # PBCR greedy-move machinery
    gm_node_budget: int = 5000
    reconnect_lookahead: int = 8
    invocation_cap_factor: int = 20
    # hybrid A*
    node_budget: int = 200_000
    bin_xy: float = 1.0
    bin_theta_frac: float = 0.5
    shot_radius_factor: float = 3.0
    shot_every: int = 10
    # ECCR
    subopt: float = 1.5
    window: int = 5
    window_node_budget: int = 20_000
    # run limits
    max_steps: int = 500
    time_limit: float = 60.0
    lifelong_max_steps: int = 5000
    lifelong_time_limit: float = 600.0

    def __post_init__(self) -> None:
        if self.subopt < 1.0:
            raise ValueError("subopt must be >= 1")
        if self.window < 1 or self.max_steps < 0 or self.n_sub < 0:
            raise ValueError("window must be >= 1; max_steps and n_sub >= 0")

    # -- builders -----------------------------------------------------------
    @property
    def dtheta(self) -> float:
        return math.radians(self.dtheta_deg)

    def shape(self) -> RobotShape:
        return RobotShape(self.robot_length, self.robot_width, self.wheelbase)

    def kinematics(self) -> KinematicParams:
        dt = self.dt if self.dt is not None else self.r_m * self.dtheta / self.u_m
        return KinematicParams(self.u_m, math.radians(self.phi_m_deg), self.r_m, dt)

    def discretization(self) -> DiscretizationParams:
        return DiscretizationParams(self.dx, self.dy, self.dtheta)

    def costs(self) -> CostParams:
        return CostParams(self.c_turn, self.c_rev, self.c_switch, self.c_wait)

    def weights(self) -> QWeights:
        return QWeights(self.lam, self.alpha_scale, self.beta_scale)

    def search(self, node_budget: int | None = None) -> SearchConfig:
        return SearchConfig(
            self.bin_xy, self.bin_theta_frac, self.node_budget if node_budget is None else node_budget,
            self.shot_radius_factor, self.shot_every,
        )

    def model(self, ws: Workspace) -> MotionModel:
        return MotionModel(ws, self.shape(), self.kinematics(), self.discretization(), self.costs(), self.n_sub)

    def pbcr(self, variant: str = "v2") -> PbcrConfig:
        if variant not in VARIANTS:
            raise ValueError(f"unknown PBCR variant {variant!r}")
        return PbcrConfig(
            VARIANTS[variant], self.weights(), self.v0_keeps_alpha, self.count_wait,
            self.search(self.gm_node_budget), self.reconnect_lookahead, self.invocation_cap_factor,
        )

    def eccr(self, w: float | None = None) -> EccrConfig:
        w = self.subopt if w is None else w
        return EccrConfig(w=w, high_level_focal=w > 1.0, low=self.search(),
                          window_low=self.search(self.window_node_budget))

    # -- files --------------------------------------------------------------
    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **kw) -> "Config":
        return dataclasses.replace(self, **kw)


def load_config(path: str | os.PathLike | None = None) -> Config:
    """Defaults overridden by a JSON file (``path`` or ``$CARPLAN_CONFIG``)."""
    path = path if path is not None else os.environ.get(ENV_VAR)
    if not path:
        return Config()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return Config.from_dict(data)
