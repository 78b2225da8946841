"""Multi-robot motion planning for car-like robots.

Decentralized PBCR (priority inheritance with backtracking over motion
primitives) and centralized ECCR (focal conflict-based search over
spatiotemporal hybrid A*), on a shared Reeds-Shepp / hybrid-A* substrate.
"""

from .config import Config, load_config
from .eccr import EccrConfig, solve_static, solve_windowed
from .geometry import CircleObstacle, DiscretizationParams, RobotShape, State, Workspace
from .hybrid_astar import DynamicObstacles, FocalParams, SearchConfig, plan_constrained, plan_vanilla
from .pbcr import PbcrConfig, PbcrPlanner
from .primitives import CostParams, KinematicParams, MotionModel, Primitive, Step, Trajectory
from .reeds_shepp import rs_length, rs_shortest
from .simulation import (
    Instance,
    MapSpec,
    Metrics,
    PlannerSpec,
    corridor_instance,
    generate_instance,
    generate_instances,
    run_lifelong,
    run_static,
    validate,
)

__version__ = "0.1.0"
