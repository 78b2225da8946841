"""Centralized conflict-based planner with focal search at both levels.

The high level keeps a constraint tree.  OPEN is ordered by the node lower
bound ``lb`` (sum of the low-level f_min certificates); FOCAL holds the nodes
with ``cost <= w * lb_min`` and is ordered by the number of pairwise
conflicts.  Expanding a node splits on its first conflict, adding to each
child one constraint that forbids a robot the other robot's exact swept
footprint at that timestep.  With ``w = 1`` the search is the plain
conflict-based baseline (best-first by cost, optimal low level).
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .geometry import State
from .heuristics import build_holonomic_field
from .hybrid_astar import DynamicObstacles, FocalParams, SearchConfig, SearchResult, plan_constrained
from .primitives import MotionModel, Primitive, Step, Trajectory


@dataclass(frozen=True)
class Conflict:
    i: int
    j: int
    t: int
    sub: int


@dataclass(frozen=True, eq=False)
class Constraint:
    robot: int
    t: int
    samples: np.ndarray  # the other robot's swept samples over step t

    def key(self) -> tuple:
        return (self.robot, self.t, self.samples.tobytes())


@dataclass(frozen=True)
class EccrConfig:
    w: float = 1.5
    high_level_focal: bool = True
    low: SearchConfig = SearchConfig()
    window_low: SearchConfig = SearchConfig(node_budget=20_000)  # low-level budget per windowed replan


@dataclass
class HighLevelNode:
    constraints: dict[int, tuple[Constraint, ...]]
    paths: list[Trajectory]
    costs: list[float]
    lbs: list[float]
    conflict: Conflict | None = None
    conflict_count: int = 0
    seq: int = 0

    @property
    def cost(self) -> float:
        return float(sum(self.costs))

    @property
    def lb(self) -> float:
        return float(sum(self.lbs))


@dataclass
class Solution:
    paths: list[Trajectory] | None
    cost: float = math.inf
    lb_min: float = math.inf
    hl_expansions: int = 0
    ll_expansions: int = 0
    status: str = "ok"  # ok | infeasible | timeout | exhausted

    @property
    def ok(self) -> bool:
        return self.paths is not None


def path_samples(traj: Trajectory, k: int) -> np.ndarray:
    """Sweep array (T, k, 3) of a trajectory; a zero-step path is one hold row."""
    if not traj.steps:
        return np.tile(np.array(traj.start.as_tuple()), (1, k, 1))
    return np.stack([s.samples for s in traj.steps])


def _padded(paths: list[np.ndarray]) -> np.ndarray:
    T = max(len(p) for p in paths) + 1
    out = np.empty((len(paths), T, paths[0].shape[1], 3))
    for i, p in enumerate(paths):
        out[i, : len(p)] = p
        out[i, len(p):] = p[-1, -1]
    return out


def detect_conflicts(paths, model: MotionModel, horizon: int | None = None) -> tuple[Conflict | None, int]:
    """First conflict in (t, i, j) order and the total conflict count.

    ``paths`` are Trajectories or (T, k, 3) sweep arrays; shorter ones hold
    their final pose.
    """
    if len(paths) < 2:
        return None, 0
    k = model.n_sub + 2
    arrs = [p if isinstance(p, np.ndarray) else path_samples(p, k) for p in paths]
    P = _padded(arrs)
    h = P.shape[1] if horizon is None else int(horizon)
    t, i, j, sub, count = K.scan_conflicts(P, h, model.off, model.hl, model.hw, model.reach2, model.reach_step2)
    if t < 0:
        return None, 0
    return Conflict(int(i), int(j), int(t), int(sub)), int(count)


def _sweep_at(arr: np.ndarray, t: int) -> np.ndarray:
    if t < len(arr):
        return arr[t].copy()
    return np.repeat(arr[-1, -1:], arr.shape[1], axis=0)


class _HighLevel:
    def __init__(self, model, starts, goals, cfg: EccrConfig, window, deadline):
        self.model = model
        self.starts = list(starts)
        self.goals = list(goals)
        self.cfg = cfg
        self.window = window
        self.deadline = deadline
        self.fields = [build_holonomic_field(g, model.ws) for g in goals]
        self.k = model.n_sub + 2
        self.hl_expansions = 0
        self.ll_expansions = 0
        self.seq = 0
        self.timed_out = False
        self.holds = 0

    def horizon(self) -> int | None:
        return None if not math.isfinite(self.window) else int(self.window)

    def low(self, i: int, constraints, others: list[np.ndarray]):
        m = self.model
        soft_h = self.window if math.isfinite(self.window) else math.inf
        dyn = DynamicObstacles(m.n_sub, (), others, [(c.t, c.samples) for c in constraints], soft_h)
        windowed = math.isfinite(self.window)
        res = plan_constrained(
            self.starts[i], self.goals[i], m, dyn, FocalParams(self.cfg.w, self.window), 0,
            self.cfg.window_low if windowed else self.cfg.low, self.fields[i], self.deadline,
        )
        self.ll_expansions += res.expansions
        if res.status == "timeout":
            self.timed_out = True
        elif not res.ok and windowed:
            res = self.hold(i, constraints, res.expansions)
        if res.ok:
            res.trajectory.robot = i
        return res

    def hold(self, i: int, constraints, expansions: int) -> SearchResult:
        """Windowed fallback when no path to the goal is found: stay put for the window.

        Only the committed prefix matters in windowed mode, so a robot that
        holds still keeps the rest of the team moving.  The hold must respect
        the robot's constraints.
        """
        m = self.model
        s = self.starts[i]
        st = _wait_step(s, self.k)
        for c in constraints:
            if c.t < self.window and K.any_hit(st.samples, c.samples[None], m.off, m.hl, m.hw, m.reach2, m.reach_step2):
                return SearchResult(None, expansions=expansions, status="exhausted")
        steps = [_wait_step(s, self.k) for _ in range(int(self.window))]
        cost = sum(m.cost(None, x) for x in steps)
        self.holds += 1
        return SearchResult(Trajectory(i, s, steps), cost, cost, expansions, "hold")

    def finish(self, node: HighLevelNode) -> None:
        sweeps = [path_samples(p, self.k) for p in node.paths]
        node.conflict, node.conflict_count = detect_conflicts(sweeps, self.model, self.horizon())

    def root(self) -> HighLevelNode | None:
        paths, costs, lbs, sweeps = [], [], [], []
        for i in range(len(self.starts)):
            res = self.low(i, (), sweeps)
            if not res.ok:
                return None
            paths.append(res.trajectory)
            costs.append(res.cost)
            lbs.append(res.lb)
            sweeps.append(path_samples(res.trajectory, self.k))
        node = HighLevelNode({}, paths, costs, lbs)
        self.finish(node)
        return node

    def child(self, parent: HighLevelNode, c: Constraint) -> HighLevelNode | None:
        i = c.robot
        existing = parent.constraints.get(i, ())
        if any(e.key() == c.key() for e in existing):
            raise AssertionError("duplicate constraint generated")
        cons = dict(parent.constraints)
        cons[i] = existing + (c,)
        others = [path_samples(p, self.k) for r, p in enumerate(parent.paths) if r != i]
        res = self.low(i, cons[i], others)
        if not res.ok:
            return None
        paths = list(parent.paths)
        costs = list(parent.costs)
        lbs = list(parent.lbs)
        paths[i] = res.trajectory
        costs[i] = res.cost
        lbs[i] = res.lb
        node = HighLevelNode(cons, paths, costs, lbs)
        self.finish(node)
        return node

    def run(self) -> Solution:
        n = len(self.starts)
        if n == 0:
            return Solution([], 0.0, 0.0)
        root = self.root()
        if root is None:
            status = "timeout" if self.timed_out else "infeasible"
            return Solution(None, hl_expansions=0, ll_expansions=self.ll_expansions, status=status)
        w = self.cfg.w if self.cfg.high_level_focal else 1.0
        open_heap: list = []
        pending: list = []
        focal: list = []
        closed: set[int] = set()

        def push(node: HighLevelNode) -> None:
            self.seq += 1
            node.seq = self.seq
            heapq.heappush(open_heap, (node.lb, node.seq, node))
            heapq.heappush(pending, (node.cost, node.seq, node))

        push(root)
        while open_heap:
            while open_heap and open_heap[0][1] in closed:
                heapq.heappop(open_heap)
            if not open_heap:
                break
            lb_min = open_heap[0][0]
            bound = w * lb_min * (1.0 + 1e-9)
            while pending and pending[0][0] <= bound:
                c, sq, nd = heapq.heappop(pending)
                if sq not in closed:
                    heapq.heappush(focal, (nd.conflict_count, c, sq, nd))
            if not focal:
                # every remaining node has cost above the bound; the lb heap
                # top is then the node to expand (plain best-first)
                _, sq, node = heapq.heappop(open_heap)
                closed.add(sq)
            else:
                cc, c, sq, node = heapq.heappop(focal)
                if sq in closed:
                    continue
                if c > bound:
                    heapq.heappush(pending, (c, sq, node))
                    continue
                closed.add(sq)
            if node.conflict is None:
                return Solution(node.paths, node.cost, lb_min, self.hl_expansions, self.ll_expansions)
            if self.deadline is not None and time.perf_counter() > self.deadline:
                return Solution(None, lb_min=lb_min, hl_expansions=self.hl_expansions,
                                ll_expansions=self.ll_expansions, status="timeout")
            self.hl_expansions += 1
            cf = node.conflict
            si = _sweep_at(path_samples(node.paths[cf.i], self.k), cf.t)
            sj = _sweep_at(path_samples(node.paths[cf.j], self.k), cf.t)
            for cons in (Constraint(cf.i, cf.t, sj), Constraint(cf.j, cf.t, si)):
                kid = self.child(node, cons)
                if kid is not None:
                    push(kid)
                elif self.timed_out:
                    return Solution(None, lb_min=lb_min, hl_expansions=self.hl_expansions,
                                    ll_expansions=self.ll_expansions, status="timeout")
        return Solution(None, hl_expansions=self.hl_expansions, ll_expansions=self.ll_expansions, status="exhausted")


def solve_static(
    model: MotionModel,
    starts,
    goals,
    cfg: EccrConfig = EccrConfig(),
    time_limit: float | None = None,
) -> Solution:
    """Plan all robots to their goals with cost <= w * lb_min."""
    deadline = None if time_limit is None else time.perf_counter() + time_limit
    return _HighLevel(model, starts, goals, cfg, math.inf, deadline).run()


@dataclass
class WindowedResult:
    steps: list[list[Step]]  # per robot, the committed steps
    stalled: bool
    hl_expansions: int = 0
    ll_expansions: int = 0
    holds: int = 0  # low-level failures replaced by holding still


def _wait_step(s: State, k: int) -> Step:
    return Step(Primitive.WAIT, s, s, np.tile(np.array(s.as_tuple()), (k, 1)), 0.0)


def solve_windowed(
    model: MotionModel,
    states,
    goals,
    window: int = 5,
    cfg: EccrConfig = EccrConfig(),
    time_limit: float | None = None,
) -> WindowedResult:
    """Resolve conflicts within ``window`` steps and commit that prefix.

    Paths shorter than the window are padded with WAIT at their final pose.
    On timeout or failure every robot commits a single WAIT (a stall).
    """
    deadline = None if time_limit is None else time.perf_counter() + time_limit
    hl = _HighLevel(model, states, goals, cfg, window, deadline)
    sol = hl.run()
    k = model.n_sub + 2
    if not sol.ok:
        return WindowedResult([[_wait_step(s, k)] for s in states], True, sol.hl_expansions, sol.ll_expansions, hl.holds)
    out = []
    for s, p in zip(states, sol.paths):
        steps = list(p.steps[:window])
        last = steps[-1].end if steps else s
        while len(steps) < window:
            steps.append(_wait_step(last, k))
        out.append(steps)
    return WindowedResult(out, False, sol.hl_expansions, sol.ll_expansions, hl.holds)
