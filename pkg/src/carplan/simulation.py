"""Instances, the independent trajectory validator, metrics and the run loops.

The validator never trusts the samples a planner stored in its steps: it
re-derives every swept pose from the step's label and endpoints (closed-form
primitives, or the shared Reeds-Shepp connector for GM/RS) and checks
collisions with the pure-Python separating-axis routine in ``geometry``
rather than the compiled kernels the planners use.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .eccr import solve_static, solve_windowed
from .geometry import (
    CircleObstacle,
    DiscretizationParams,
    RobotShape,
    State,
    Workspace,
    boxes_intersect,
    box_circle_intersect,
    footprint,
    in_workspace,
)
from .pbcr import PbcrPlanner
from .primitives import (
    KinematicParams,
    MotionModel,
    Primitive,
    Step,
    Trajectory,
    apply_primitive,
    connect_motion,
)
from .reeds_shepp import rs_shortest

GOAL_TOL = 1e-6
KIN_TOL = 1e-9
CURV_TOL = 1e-6
POSE_EPS = 1e-11  # absolute rounding bound on sampled poses (coordinates up to ~1e3)
MAX_REJECTIONS = 100_000
ALGOS = ("pbcr-v0", "pbcr-v1", "pbcr-v2", "eccr", "clcbs")


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Instance:
    """Workspace, robot model and per-robot start plus goal queue.

    A static instance has exactly one goal per robot; a lifelong one has a
    queue that is consumed in order.
    """

    workspace: Workspace
    starts: tuple[State, ...]
    goal_queues: tuple[tuple[State, ...], ...]
    shape: RobotShape = RobotShape()
    kinematics: KinematicParams = KinematicParams()
    discretization: DiscretizationParams = DiscretizationParams()
    seed: int | None = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", tuple(self.starts))
        object.__setattr__(self, "goal_queues", tuple(tuple(q) for q in self.goal_queues))
        if len(self.starts) != len(self.goal_queues):
            raise ValueError("need one goal queue per start")
        if any(len(q) == 0 for q in self.goal_queues):
            raise ValueError("every robot needs at least one goal")

    @property
    def n(self) -> int:
        return len(self.starts)

    @property
    def goals(self) -> tuple[State, ...]:
        """First goal of every robot (the static goals)."""
        return tuple(q[0] for q in self.goal_queues)

    @property
    def lifelong(self) -> bool:
        return any(len(q) > 1 for q in self.goal_queues)

    def model(self, cfg: Config = Config()) -> MotionModel:
        return MotionModel(self.workspace, self.shape, self.kinematics, self.discretization, cfg.costs(), cfg.n_sub)

    def check(self) -> list[str]:
        """Problems that make the instance unusable (empty if valid)."""
        errs = []
        ws = self.workspace
        placed = list(self.starts) + list(self.goals)
        for k, s in enumerate(placed):
            b = footprint(s, self.shape)
            what = f"{'start' if k < self.n else 'goal'} {k % max(self.n, 1)}"
            if not in_workspace(b, ws) or any(box_circle_intersect(b, o) for o in ws.obstacles):
                errs.append(f"{what} is not collision-free")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                for a, b, what in ((self.starts[i], self.starts[j], "starts"), (self.goals[i], self.goals[j], "goals")):
                    if boxes_intersect(footprint(a, self.shape), footprint(b, self.shape)):
                        errs.append(f"{what} of robots {i} and {j} overlap")
        for i, q in enumerate(self.goal_queues):
            for g in q[1:]:
                b = footprint(g, self.shape)
                if not in_workspace(b, ws) or any(box_circle_intersect(b, o) for o in ws.obstacles):
                    errs.append(f"a queued goal of robot {i} is not collision-free")
        return errs


@dataclass(frozen=True)
class MapSpec:
    width: float = 100.0
    height: float = 100.0
    n_obstacles: int = 50
    obstacle_radius: float = 1.0


def heading_grid(dtheta: float) -> list[float]:
    """Headings k * dtheta that lie in [-pi, pi)."""
    kmax = int(math.floor(math.pi / dtheta))
    return [k * dtheta for k in range(-kmax, kmax + 1) if -math.pi <= k * dtheta < math.pi]


class _Sampler:
    def __init__(self, rng: random.Random, ws: Workspace, shape: RobotShape, headings: list[float]):
        self.rng = rng
        self.ws = ws
        self.shape = shape
        self.headings = headings
        self.rejections = 0

    def _reject(self) -> None:
        self.rejections += 1
        if self.rejections > MAX_REJECTIONS:
            raise RuntimeError(f"placement failed after {MAX_REJECTIONS} rejections")

    def pose(self, avoid: list[State]) -> State:
        reach = 2.0 * self.shape.circumradius
        while True:
            s = State(
                self.rng.uniform(0.0, self.ws.width),
                self.rng.uniform(0.0, self.ws.height),
                self.rng.choice(self.headings),
            )
            b = footprint(s, self.shape)
            if not in_workspace(b, self.ws) or any(box_circle_intersect(b, o) for o in self.ws.obstacles):
                self._reject()
                continue
            if any(
                math.hypot(s.x - a.x, s.y - a.y) <= reach and boxes_intersect(b, footprint(a, self.shape)) for a in avoid
            ):
                self._reject()
                continue
            return s


def generate_instance(
    spec: MapSpec,
    n: int,
    seed: int,
    cfg: Config = Config(),
    goals_per_robot: int = 1,
    name: str = "",
) -> Instance:
    """Seeded rejection sampling of obstacles, then starts, then goals.

    Obstacle discs may not overlap each other; all starts and first goals
    are mutually disjoint.  Later goals of a lifelong queue only need to be
    obstacle-free.
    """
    if goals_per_robot < 1:
        raise ValueError("goals_per_robot must be >= 1")
    rng = random.Random(seed)
    obstacles: list[CircleObstacle] = []
    rejections = 0
    r = spec.obstacle_radius
    while len(obstacles) < spec.n_obstacles:
        o = CircleObstacle(rng.uniform(0.0, spec.width), rng.uniform(0.0, spec.height), r)
        if any(math.hypot(o.x - p.x, o.y - p.y) < o.radius + p.radius for p in obstacles):
            rejections += 1
            if rejections > MAX_REJECTIONS:
                raise RuntimeError("obstacle placement failed")
            continue
        obstacles.append(o)
    ws = Workspace(spec.width, spec.height, tuple(obstacles))
    shape = cfg.shape()
    smp = _Sampler(rng, ws, shape, heading_grid(cfg.dtheta))
    placed: list[State] = []
    starts = []
    for _ in range(n):
        s = smp.pose(placed)
        placed.append(s)
        starts.append(s)
    firsts = []
    for _ in range(n):
        g = smp.pose(placed)
        placed.append(g)
        firsts.append(g)
    queues = []
    for g in firsts:
        queues.append((g,) + tuple(smp.pose([]) for _ in range(goals_per_robot - 1)))
    return Instance(ws, tuple(starts), tuple(queues), shape, cfg.kinematics(), cfg.discretization(), seed, name)


def generate_instances(
    spec: MapSpec,
    n: int,
    count: int,
    seed: int,
    cfg: Config = Config(),
    goals_per_robot: int = 1,
) -> list[Instance]:
    """``count`` instances; instance ``k`` uses the derived seed ``seed * 1000003 + k``."""
    return [
        generate_instance(spec, n, seed * 1_000_003 + k, cfg, goals_per_robot, name=f"s{seed}_n{n}_{k:03d}")
        for k in range(count)
    ]


def corridor_instance(
    length: float = 60.0,
    height: float = 20.0,
    gap: float = 6.0,
    separation: float = 20.0,
    cfg: Config = Config(),
) -> Instance:
    """Two robots facing each other in a corridor walled by rows of unit discs.

    Each robot's goal is the other's start position with its own heading, so
    both must pass the other inside a ``gap``-wide lane.
    """
    y = 0.5 * height
    walls = []
    x = 1.0
    while x < length:
        walls.append(CircleObstacle(x, y + 0.5 * gap + 1.0, 1.0))
        walls.append(CircleObstacle(x, y - 0.5 * gap - 1.0, 1.0))
        x += 2.0
    a, b = 0.5 * (length - separation), 0.5 * (length + separation)
    starts = (State(a, y, 0.0), State(b, y, math.pi))
    goals = ((State(b, y, 0.0),), (State(a, y, math.pi),))
    ws = Workspace(length, height, tuple(walls))
    return Instance(ws, starts, goals, cfg.shape(), cfg.kinematics(), cfg.discretization(), None, "corridor")


# ---------------------------------------------------------------------------
# validator
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Violation:
    kind: str  # endpoint | chain | kinematics | boundary | obstacle | pairwise | input
    robot: int
    t: float
    other: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        who = f"robots {self.robot},{self.other}" if self.other is not None else f"robot {self.robot}"
        return f"{self.kind} {who} t={self.t:g}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def summary(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def step_poses(step: Step, kin: KinematicParams, n_sub: int) -> np.ndarray:
    """Swept poses (n_sub + 2, 3) re-derived from the step's label and endpoints."""
    k = n_sub + 2
    p = step.primitive
    if p is Primitive.WAIT:
        return np.tile(np.array(step.start.as_tuple()), (k, 1))
    if p.is_moving:
        out = np.empty((k, 3))
        out[0] = step.start.as_tuple()
        for j in range(1, k):
            part = KinematicParams(kin.u_m, kin.phi_m, kin.r_m, kin.dt * j / (k - 1))
            out[j] = apply_primitive(step.start, p, part).as_tuple()
        return out
    smp, _ = connect_motion(step.start, step.end, kin, n_sub)
    return smp


def _max_curvature(frm: State, to: State, radius: float, per_segment: int = 8) -> float:
    """Largest chord-based curvature estimate along the RS curve, segment by segment.

    Rounding in the sampled poses makes the estimate unreliable on very short
    chords, so each chord's estimate is reduced by its rounding bound
    POSE_EPS / chord before taking the maximum.
    """
    path = rs_shortest(frm, to, radius)
    worst = 0.0
    s0 = 0.0
    for seg in path.segments:
        ln = seg.length(radius)
        if ln > 1e-12:
            poses = path.sample_many(np.linspace(s0, s0 + ln, per_segment + 1))
            for a, b in zip(poses[:-1], poses[1:]):
                chord = math.hypot(b[0] - a[0], b[1] - a[1])
                if chord > 1e-12:
                    dth = math.remainder(b[2] - a[2], 2.0 * math.pi)
                    est = 2.0 * abs(math.sin(0.5 * dth)) / chord
                    worst = max(worst, est - POSE_EPS / chord)
        s0 += ln
    return worst


def _check_step(step: Step, kin: KinematicParams, n_sub: int) -> str | None:
    p = step.primitive
    if p is Primitive.WAIT:
        if step.start.pose_error(step.end) > KIN_TOL or step.arc_len != 0.0:
            return "WAIT step moves"
        return None
    if p.is_moving:
        err = apply_primitive(step.start, p, kin).pose_error(step.end)
        if err > KIN_TOL:
            return f"{p.value} endpoint off by {err:.3g}"
        if abs(step.arc_len - kin.step_len) > KIN_TOL:
            return f"{p.value} arc length {step.arc_len!r} != {kin.step_len!r}"
        return None
    _, length = connect_motion(step.start, step.end, kin, n_sub)
    if length > kin.step_len + KIN_TOL:
        return f"{p.value} segment length {length:.9g} exceeds one step"
    if abs(step.arc_len - length) > KIN_TOL:
        return f"{p.value} recorded length {step.arc_len!r} != {length!r}"
    curv = _max_curvature(step.start, step.end, kin.r_m)
    if curv > 1.0 / kin.r_m + CURV_TOL:
        return f"{p.value} curvature {curv:.9g} exceeds 1/r_m"
    return None


def _episodes(hit_idx: np.ndarray, per_step: int) -> list[float]:
    """One reported time per run of consecutive colliding grid indices.

    The reported time is the first integer timestep inside the run, or the
    run's first time when it contains none.
    """
    out = []
    if len(hit_idx) == 0:
        return out
    runs = np.split(hit_idx, np.nonzero(np.diff(hit_idx) > 1)[0] + 1)
    for run in runs:
        ints = run[run % per_step == 0]
        g = ints[0] if len(ints) else run[0]
        out.append(g / per_step)
    return out


def validate(
    instance: Instance,
    trajectories: list[Trajectory],
    n_sub: int = 5,
    check_goals: bool = True,
) -> ValidationReport:
    """Re-check endpoints, kinematics and collisions of a joint solution.

    Poses are compared on a common time grid with ``n_sub`` interior samples
    per step; a robot whose trajectory is shorter holds its final pose.  With
    ``check_goals`` every robot must end at its first goal.
    """
    rep = ValidationReport()
    V = rep.violations
    kin = instance.kinematics
    shape = instance.shape
    ws = instance.workspace
    n = instance.n
    if len(trajectories) != n:
        V.append(Violation("input", -1, 0, detail=f"{len(trajectories)} trajectories for {n} robots"))
        return rep
    per_step = n_sub + 1
    T = max((len(tr.steps) for tr in trajectories), default=0)
    G = T * per_step + 1
    poses = np.empty((n, G, 3))
    for i, tr in enumerate(trajectories):
        if tr.start.pose_error(instance.starts[i]) > GOAL_TOL:
            V.append(Violation("endpoint", i, 0, detail="trajectory does not begin at the start"))
        prev = tr.start
        cur = [np.array(tr.start.as_tuple())[None, :]]
        for t, st in enumerate(tr.steps):
            if st.start.pose_error(prev) > KIN_TOL:
                V.append(Violation("chain", i, t, detail="step does not begin where the previous one ended"))
            msg = _check_step(st, kin, n_sub)
            if msg:
                V.append(Violation("kinematics", i, t, detail=msg))
            cur.append(step_poses(st, kin, n_sub)[1:])
            prev = st.end
        arr = np.concatenate(cur)
        poses[i, : len(arr)] = arr
        poses[i, len(arr):] = arr[-1]
        if check_goals and tr.final.pose_error(instance.goals[i]) > GOAL_TOL:
            V.append(Violation("endpoint", i, len(tr.steps), detail="trajectory does not end at the goal"))
    if n == 0:
        return rep

    # static environment
    hl, hw = 0.5 * shape.length, 0.5 * shape.width
    off = shape.center_offset
    obs = np.array([[o.x, o.y, o.radius] for o in ws.obstacles]).reshape(-1, 3)
    for i in range(n):
        P = poses[i]
        c, s = np.cos(P[:, 2]), np.sin(P[:, 2])
        cx, cy = P[:, 0] + off * c, P[:, 1] + off * s
        out = np.zeros(G, dtype=bool)
        for a, b in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            px = cx + a * hl * c - b * hw * s
            py = cy + a * hl * s + b * hw * c
            out |= (px < 0) | (px > ws.width) | (py < 0) | (py > ws.height)
        for t in _episodes(np.nonzero(out)[0], per_step):
            V.append(Violation("boundary", i, t, detail="footprint leaves the map"))
        if len(obs):
            d = np.hypot(cx[:, None] - obs[None, :, 0], cy[:, None] - obs[None, :, 1])
            near = d <= obs[None, :, 2] + shape.box_radius
            hit = np.zeros(G, dtype=bool)
            for g, k in zip(*np.nonzero(near)):
                if not hit[g]:
                    b = footprint(State(*P[g]), shape)
                    hit[g] = box_circle_intersect(b, ws.obstacles[k])
            for t in _episodes(np.nonzero(hit)[0], per_step):
                V.append(Violation("obstacle", i, t, detail="footprint overlaps an obstacle"))

    # robot pairs
    cxy = np.stack([poses[..., 0] + off * np.cos(poses[..., 2]), poses[..., 1] + off * np.sin(poses[..., 2])], -1)
    reach = 2.0 * shape.box_radius
    hits: dict[tuple[int, int], list[int]] = {}
    for g in range(G):
        C = cxy[:, g]
        d2 = ((C[:, None, :] - C[None, :, :]) ** 2).sum(-1)
        ii, jj = np.nonzero(np.triu(d2 <= reach * reach, 1))
        for i, j in zip(ii.tolist(), jj.tolist()):
            if boxes_intersect(footprint(State(*poses[i, g]), shape), footprint(State(*poses[j, g]), shape)):
                hits.setdefault((i, j), []).append(g)
    for (i, j), gs in sorted(hits.items()):
        for t in _episodes(np.array(gs), per_step):
            V.append(Violation("pairwise", i, t, j, "footprints overlap"))
    V.sort(key=lambda v: (v.t, v.kind, v.robot, -1 if v.other is None else v.other))
    return rep


# ---------------------------------------------------------------------------
# metrics and runners
# ---------------------------------------------------------------------------
@dataclass
class Metrics:
    success: bool = False
    runtime: float = 0.0
    makespan: float = 0.0
    makespan_steps: int = 0
    flowtime: float = 0.0
    arrival_fraction: float = 0.0
    throughput: int = 0
    hl_expansions: int = 0
    ll_expansions: int = 0
    status: str = "ok"


def active_steps(tr: Trajectory) -> int:
    """Number of steps up to and including the last one that moves."""
    k = len(tr.steps)
    while k > 0 and tr.steps[k - 1].arc_len == 0.0:
        k -= 1
    return k


def path_metrics(trajs: list[Trajectory], u_m: float) -> tuple[float, float, int]:
    """(makespan, flowtime, makespan_steps); lengths are geometric arc lengths."""
    lens = [tr.arc_length for tr in trajs]
    makespan = max(lens, default=0.0) / u_m
    flowtime = sum(lens) / u_m
    steps = max((active_steps(tr) for tr in trajs), default=0)
    return makespan, flowtime, steps


@dataclass(frozen=True)
class PlannerSpec:
    """``algo`` is one of ALGOS; ``clcbs`` is ECCR with subopt 1."""

    algo: str = "pbcr-v2"
    subopt: float | None = None
    window: int | None = None

    def __post_init__(self) -> None:
        if self.algo not in ALGOS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGOS)}")
        if self.algo == "clcbs" and self.subopt not in (None, 1.0):
            raise ValueError("clcbs is fixed at subopt 1.0")

    @property
    def is_pbcr(self) -> bool:
        return self.algo.startswith("pbcr")

    def w(self, cfg: Config) -> float:
        if self.algo == "clcbs":
            return 1.0
        return cfg.subopt if self.subopt is None else self.subopt


@dataclass
class RunResult:
    trajectories: list[Trajectory] | None
    metrics: Metrics
    certificate: tuple[float, float] | None = None  # (cost, lb_min) of an ECCR solution


def _require_valid(instance: Instance) -> None:
    errs = instance.check()
    if errs:
        raise ValueError("invalid instance: " + "; ".join(errs[:5]))


def run_static(
    instance: Instance,
    planner: PlannerSpec = PlannerSpec(),
    cfg: Config = Config(),
    time_limit: float | None = None,
    max_steps: int | None = None,
) -> RunResult:
    """Solve a static instance.

    PBCR steps until every robot is home or ``max_steps`` is reached; the
    partial trajectories are returned either way.  ECCR/CL-CBS plan once
    under the wall-clock limit and return nothing on failure.
    """
    _require_valid(instance)
    time_limit = cfg.time_limit if time_limit is None else time_limit
    max_steps = cfg.max_steps if max_steps is None else max_steps
    model = instance.model(cfg)
    n = instance.n
    u_m = instance.kinematics.u_m
    t0 = time.perf_counter()
    if n == 0:
        return RunResult([], Metrics(True, 0.0, arrival_fraction=1.0))
    if planner.is_pbcr:
        p = PbcrPlanner(model, instance.starts, instance.goals, cfg.pbcr(planner.algo.split("-")[1]))
        trajs = [Trajectory(i, s) for i, s in enumerate(instance.starts)]
        status = "ok"
        for _ in range(max_steps):
            if p.all_at_goal():
                break
            if time.perf_counter() - t0 > time_limit:
                status = "timeout"
                break
            steps, _ = p.step()
            for tr, st in zip(trajs, steps):
                tr.steps.append(st)
        ok = p.all_at_goal()
        if not ok and status == "ok":
            status = "step_cap"
        runtime = time.perf_counter() - t0
        mk, ft, mks = path_metrics(trajs, u_m)
        frac = sum(r.at_goal for r in p.robots) / n
        m = Metrics(ok, runtime, mk, mks, ft, frac, 0, 0, p.vanilla_expansions, "ok" if ok else status)
        return RunResult(trajs, m)
    sol = solve_static(model, instance.starts, instance.goals, cfg.eccr(planner.w(cfg)), time_limit)
    runtime = time.perf_counter() - t0
    if not sol.ok:
        m = Metrics(False, runtime, hl_expansions=sol.hl_expansions, ll_expansions=sol.ll_expansions, status=sol.status)
        return RunResult(None, m)
    trajs = sol.paths
    mk, ft, mks = path_metrics(trajs, u_m)
    m = Metrics(True, runtime, mk, mks, ft, 1.0, 0, sol.hl_expansions, sol.ll_expansions)
    return RunResult(trajs, m, (sol.cost, sol.lb_min))


@dataclass
class LifelongResult:
    trajectories: list[Trajectory]
    metrics: Metrics
    tasks: list[int]  # completed tasks per robot
    steps: int = 0
    stalls: int = 0
    early_replans: int = 0  # ECCR replans triggered by a task completion


def run_lifelong(
    instance: Instance,
    planner: PlannerSpec = PlannerSpec("pbcr-v1"),
    cfg: Config = Config(),
    time_limit: float | None = None,
    max_steps: int | None = None,
) -> LifelongResult:
    """Step the world, handing each robot its next goal the moment it arrives.

    A completed task clears the robot's visit counts and resets its elapsed
    time.  Throughput is the number of goals reached before the step or
    wall-clock cap.  ECCR replans every ``window`` steps, and right after any
    robot completes a task; a failed replan commits one WAIT for everyone.
    """
    _require_valid(instance)
    time_limit = cfg.lifelong_time_limit if time_limit is None else time_limit
    max_steps = cfg.lifelong_max_steps if max_steps is None else max_steps
    model = instance.model(cfg)
    n = instance.n
    t0 = time.perf_counter()
    trajs = [Trajectory(i, s) for i, s in enumerate(instance.starts)]
    tasks = [0] * n
    nxt = [0] * n  # index of the current goal in each queue
    queues = instance.goal_queues

    def advance(i: int, s: State) -> bool:
        """Count arrivals at ``s``; return True if the goal changed."""
        changed = False
        while nxt[i] < len(queues[i]) and s.pose_error(queues[i][nxt[i]]) <= GOAL_TOL:
            tasks[i] += 1
            nxt[i] += 1
            changed = True
        return changed

    def goal_of(i: int) -> State:
        return queues[i][min(nxt[i], len(queues[i]) - 1)]

    steps_done = 0
    stalls = 0
    replans_early = 0
    hl = ll = 0
    status = "ok"
    if n == 0:
        return LifelongResult([], Metrics(True, 0.0, throughput=0), [], 0)
    if planner.is_pbcr:
        p = PbcrPlanner(model, instance.starts, instance.goals, cfg.pbcr(planner.algo.split("-")[1]))

        def reassign(i: int) -> None:
            r = p.robots[i]
            if advance(i, r.current):
                r.set_goal(goal_of(i), model.ws)
                r.elapsed = 0
                r.counts.clear()

        for i in range(n):
            reassign(i)
        while steps_done < max_steps:
            if time.perf_counter() - t0 > time_limit:
                status = "timeout"
                break
            steps, _ = p.step()
            steps_done += 1
            for i, st in enumerate(steps):
                trajs[i].steps.append(st)
                reassign(i)
        ll = p.vanilla_expansions
    else:
        window = planner.window or cfg.window
        ecfg = cfg.eccr(planner.w(cfg))
        states = list(instance.starts)
        for i in range(n):
            advance(i, states[i])
        while steps_done < max_steps:
            left = time_limit - (time.perf_counter() - t0)
            if left <= 0:
                status = "timeout"
                break
            res = solve_windowed(model, states, [goal_of(i) for i in range(n)], window, ecfg, left)
            hl += res.hl_expansions
            ll += res.ll_expansions
            stalls += int(res.stalled)
            for k in range(min(len(res.steps[0]), max_steps - steps_done)):
                new_task = False
                for i in range(n):
                    st = res.steps[i][k]
                    trajs[i].steps.append(st)
                    states[i] = st.end
                    new_task |= advance(i, st.end)
                steps_done += 1
                if new_task:
                    replans_early += 1
                    break
    runtime = time.perf_counter() - t0
    mk, ft, mks = path_metrics(trajs, instance.kinematics.u_m)
    done = sum(tasks)
    m = Metrics(done > 0, runtime, mk, mks, ft, sum(nxt[i] >= len(queues[i]) for i in range(n)) / n,
                done, hl, ll, status)
    return LifelongResult(trajs, m, tasks, steps_done, stalls, replans_early)
