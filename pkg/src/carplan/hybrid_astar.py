"""Single-robot hybrid A*: vanilla, spatiotemporal and focal (bounded-suboptimal).

One search core serves every mode.  Nodes carry an absolute time index; the
duplicate-detection key folds time into ``min(t, T_c + 1)`` where ``T_c`` is
the last timestep at which anything time-dependent (hard dynamic paths or
constraints) changes.  Without dynamic obstacles the key therefore ignores
time, which is exactly vanilla hybrid A*.

OPEN is ordered by f; FOCAL holds the nodes with ``f <= w * f_min`` ordered by
``(d, h, f, seq)`` (greedy inside the bound), ``d`` counting collisions with soft (other robots' current)
paths.  Analytic Reeds-Shepp completions are chopped into step-sized pieces
labelled RS and pushed as goal nodes with ``f = g``; the search ends when a
goal node is popped from FOCAL, so the returned cost is at most ``w`` times
the smallest f in OPEN at that moment.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .geometry import State
from .heuristics import HolonomicField, build_holonomic_field, dist_h
from .primitives import MotionModel, Primitive, Step, Trajectory, free_step
from .reeds_shepp import rs_shortest

GOAL_TOL = 1e-6


@dataclass(frozen=True)
class FocalParams:
    w: float = 1.0
    window: float = math.inf

    def __post_init__(self) -> None:
        if self.w < 1.0:
            raise ValueError("suboptimality ratio must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")


@dataclass(frozen=True)
class SearchConfig:
    bin_xy: float = 1.0
    bin_theta_frac: float = 0.5  # fraction of the discretization heading step
    node_budget: int = 200_000
    shot_radius_factor: float = 3.0
    shot_every: int = 10


@dataclass
class SearchResult:
    trajectory: Trajectory | None
    cost: float = math.inf
    lb: float = math.inf  # f_min in OPEN when the goal node was popped
    expansions: int = 0
    status: str = "ok"  # ok | exhausted | budget | timeout

    @property
    def ok(self) -> bool:
        return self.trajectory is not None


class DynamicObstacles:
    """Time-indexed swept samples other robots occupy.

    Each path is an array (T, k, 3): row ``t`` holds the samples of the step
    from absolute time t to t+1.  After its last row a path holds its final
    pose.  ``hard`` paths and constraints must be avoided; ``soft`` paths
    only count toward the focal conflict score, and only before
    ``soft_horizon``.
    """

    def __init__(self, n_sub: int = 5, hard=(), soft=(), constraints=(), soft_horizon: float = math.inf):
        self.k = n_sub + 2
        self.hard = [self._norm(p) for p in hard]
        self.soft = [self._norm(p) for p in soft]
        self.constraints: dict[int, list[np.ndarray]] = {}
        for t, smp in constraints:
            self.constraints.setdefault(int(t), []).append(np.asarray(smp, dtype=np.float64))
        lens = [len(p) for p in self.hard] + [t + 1 for t in self.constraints]
        self.t_change = max(lens) - 1 if lens else -1
        self.soft_end = max((len(p) for p in self.soft), default=0)
        self.soft_horizon = soft_horizon
        self._hard_cache: dict[int, np.ndarray] = {}
        self._soft_cache: dict[int, np.ndarray] = {}
        # bounding discs of the constraints, for time-key collapsing
        cs = [(t, c) for t, lst in self.constraints.items() for c in lst]
        self.c_t = np.array([t for t, _ in cs], dtype=np.float64)
        if cs:
            pts = np.array([c[:, :2] for _, c in cs])
            ctr = pts.mean(axis=1)
            self.c_xy = ctr
            self.c_r = np.sqrt(((pts - ctr[:, None, :]) ** 2).sum(-1)).max(axis=1)
        else:
            self.c_xy = np.zeros((0, 2))
            self.c_r = np.zeros(0)

    def _norm(self, p) -> np.ndarray:
        a = np.asarray(p, dtype=np.float64)
        if a.ndim != 3 or a.shape[0] == 0:
            raise ValueError("dynamic paths must be non-empty (T, k, 3) arrays")
        return a

    @staticmethod
    def _row(p: np.ndarray, t: int) -> np.ndarray:
        if t < len(p):
            return p[t]
        return np.repeat(p[-1, -1:], p.shape[1], axis=0)

    @property
    def empty(self) -> bool:
        return not self.hard and not self.soft and not self.constraints

    def hard_at(self, t: int) -> np.ndarray:
        t = min(t, self.t_change + 1)
        got = self._hard_cache.get(t)
        if got is None:
            rows = [self._row(p, t) for p in self.hard] + self.constraints.get(t, [])
            got = np.array(rows) if rows else np.zeros((0, self.k, 3))
            self._hard_cache[t] = got
        return got

    def soft_at(self, t: int) -> np.ndarray:
        if t >= self.soft_horizon:
            return np.zeros((0, self.k, 3))
        t = min(t, self.soft_end)
        got = self._soft_cache.get(t)
        if got is None:
            rows = [self._row(p, t) for p in self.soft]
            got = np.array(rows) if rows else np.zeros((0, self.k, 3))
            self._soft_cache[t] = got
        return got


class _Node:
    __slots__ = ("state", "t", "g", "f", "d", "parent", "steps", "seq", "dead", "key", "goal")

    def __init__(self, state, t, g, f, d, parent, steps, seq, key, goal=False):
        self.state = state
        self.t = t
        self.g = g
        self.f = f
        self.d = d
        self.parent = parent
        self.steps = steps
        self.seq = seq
        self.dead = False
        self.key = key
        self.goal = goal


@dataclass
class _Search:
    model: MotionModel
    goal: State
    field: HolonomicField | None
    dyn: DynamicObstacles
    w: float
    cfg: SearchConfig
    deadline: float | None
    seq: int = 0
    expansions: int = 0
    open_heap: list = field(default_factory=list)
    pending: list = field(default_factory=list)
    focal: list = field(default_factory=list)
    best: dict = field(default_factory=dict)
    closed: dict = field(default_factory=dict)  # key -> g it was expanded at

    def __post_init__(self) -> None:
        m = self.model
        self.off, self.hl, self.hw = m.off, m.hl, m.hw
        self.bin_th = self.cfg.bin_theta_frac * m.disc.dtheta
        self.empty_dyn = self.dyn.empty
        self.body_reach = 2.0 * m.shape.circumradius
        self.t_arr = 0

    # -- bookkeeping -------------------------------------------------------
    def key(self, s: State, t: int):
        b = self.cfg.bin_xy
        return (math.floor(s.x / b), math.floor(s.y / b), math.floor(s.theta / self.bin_th), self.time_key(s, t))

    def time_key(self, s: State, t: int) -> int:
        """``t`` while something time-dependent is still reachable, else a shared value.

        Two nodes in the same bin whose futures cannot touch any remaining
        constraint face the same static world, so time is dropped from their
        key.  Hard dynamic paths are always treated as reachable.
        """
        free_t = self.dyn.t_change + 1
        if t >= free_t:
            return free_t
        if self.dyn.hard:
            return t
        dt = self.dyn.c_t - t
        live = dt >= 0
        if not live.any():
            return free_t
        dist = np.hypot(self.dyn.c_xy[:, 0] - s.x, self.dyn.c_xy[:, 1] - s.y)
        reach = self.dyn.c_r + self.body_reach + (dt + 1.0) * self.model.kin.step_len
        return t if bool((live & (dist <= reach)).any()) else free_t

    def h(self, s: State, t: int | None = None) -> float:
        """Static distance bound, raised by the earliest feasible arrival time.

        Every step except a final partial RS piece costs at least one step
        length, so reaching a goal that cannot be held before ``t_arr`` costs
        at least ``(t_arr - t - 1)`` step lengths.
        """
        h = dist_h(s, self.goal, self.field, self.model.kin.r_m)
        if t is not None and self.t_arr > t + 1:
            h = max(h, (self.t_arr - t - 1) * self.model.kin.step_len)
        return h

    def earliest_hold(self, t0: int) -> int:
        """First time >= t0 from which the goal pose can be held."""
        if self.empty_dyn:
            return t0
        smp = np.tile(np.array(self.goal.as_tuple()), (self.model.n_sub + 2, 1))
        last = max(self.dyn.t_change + 1, t0)
        t_arr = t0
        for tt in range(t0, last + 1):
            if not self.dyn_ok(smp, tt):
                t_arr = tt + 1
        return t_arr

    def push(self, node: _Node) -> None:
        heapq.heappush(self.open_heap, (node.f, node.seq, node))
        heapq.heappush(self.pending, (node.f, node.seq, node))

    def new_seq(self) -> int:
        self.seq += 1
        return self.seq

    # -- collision against the time-indexed environment ---------------------
    def dyn_ok(self, smp: np.ndarray, t: int) -> bool:
        if self.empty_dyn:
            return True
        hard = self.dyn.hard_at(t)
        if hard.shape[0] == 0:
            return True
        m = self.model
        return not K.any_hit(smp, hard, self.off, self.hl, self.hw, m.reach2, m.reach_step2)

    def soft_hits(self, smp: np.ndarray, t: int) -> int:
        if not self.dyn.soft:
            return 0
        m = self.model
        return int(K.count_hits(smp, self.dyn.soft_at(t), self.off, self.hl, self.hw, m.reach2, m.reach_step2))

    def hold(self, s: State, t: int) -> tuple[bool, int]:
        """Can the robot stay at ``s`` from time t on; soft hits while holding."""
        smp = np.tile(np.array(s.as_tuple()), (self.model.n_sub + 2, 1))
        last = max(self.dyn.t_change + 1, t)
        for tt in range(t, last + 1):
            if not self.dyn_ok(smp, tt):
                return False, 0
        hits = 0
        for tt in range(t, int(min(max(self.dyn.soft_end, t), self.dyn.soft_horizon)) + 1):
            hits += self.soft_hits(smp, tt)
        return True, hits

    # -- analytic completion ----------------------------------------------
    def shot(self, node: _Node) -> _Node | None:
        m = self.model
        step = m.kin.step_len
        s0 = node.state
        if s0.pose_error(self.goal) < GOAL_TOL:
            pieces: list[Step] = []
            end = s0
        else:
            path = rs_shortest(s0, self.goal, m.kin.r_m)
            total = path.length
            n = max(1, math.ceil(total / step - 1e-9))
            # cheap whole-path screen before building exact pieces
            dense = path.sample_many(np.linspace(0.0, total, n * (m.n_sub + 1) + 1))
            if not m.samples_free(dense):
                return None
            cuts = path.sample_many(np.array([min(i * step, total) for i in range(n + 1)]))
            poses = [s0] + [State(*map(float, c)) for c in cuts[1:-1]] + [self.goal]
            pieces = []
            for i in range(n):
                st = free_step(Primitive.RS, poses[i], poses[i + 1], m.kin, m.n_sub)
                if st.arc_len > step + 1e-9 or not m.samples_free(st.samples):
                    return None
                pieces.append(st)
            end = self.goal
        d = node.d
        t = node.t
        g = node.g
        for st in pieces:
            if not self.dyn_ok(st.samples, t):
                return None
            d += self.soft_hits(st.samples, t)
            g += m.cost(None, st)
            t += 1
        ok, hits = self.hold(end, t)
        if not ok:
            return None
        return _Node(end, t, g, g, d + hits, node, pieces, self.new_seq(), None, goal=True)

    # -- main loop --------------------------------------------------------
    def run(self, start: State, t0: int) -> SearchResult:
        m = self.model
        self.t_arr = self.earliest_hold(t0)
        h0 = self.h(start, t0)
        if not math.isfinite(h0):
            return SearchResult(None, status="exhausted")
        root = _Node(start, t0, 0.0, h0, 0, None, [], self.new_seq(), self.key(start, t0))
        self.best[root.key] = (0.0, root)
        self.push(root)
        shot_r = self.cfg.shot_radius_factor * m.kin.r_m
        while self.open_heap:
            while self.open_heap and self.open_heap[0][2].dead:
                heapq.heappop(self.open_heap)
            if not self.open_heap:
                break
            f_min = self.open_heap[0][0]
            bound = self.w * f_min * (1.0 + 1e-12)
            while self.pending and self.pending[0][0] <= bound:
                f, sq, nd = heapq.heappop(self.pending)
                if not nd.dead:
                    heapq.heappush(self.focal, (nd.d, f - nd.g, f, sq, nd))
            _, _, f, sq, node = heapq.heappop(self.focal)
            if node.dead:
                continue
            if f > bound:
                heapq.heappush(self.pending, (f, sq, node))
                continue
            node.dead = True
            if node.goal:
                return SearchResult(self._trajectory(node, start), node.g, f_min, self.expansions, "ok")
            # focal order is inconsistent, so a bin reopens when reached more cheaply
            if node.g >= self.closed.get(node.key, math.inf) - 1e-12:
                continue
            self.closed[node.key] = node.g
            self.expansions += 1
            if self.expansions > self.cfg.node_budget:
                return SearchResult(None, expansions=self.expansions, status="budget")
            if self.deadline is not None and (self.expansions & 63) == 0 and time.perf_counter() > self.deadline:
                return SearchResult(None, expansions=self.expansions, status="timeout")
            hn = node.f - node.g
            if hn < shot_r or self.expansions % self.cfg.shot_every == 1:
                gnode = self.shot(node)
                if gnode is not None:
                    self.push(gnode)
            prev = node.steps[-1].primitive if node.steps else None
            for st in m.successors(node.state):
                t1 = node.t + 1
                key = self.key(st.end, t1)
                g = node.g + m.cost(prev, st)
                if g >= self.closed.get(key, math.inf) - 1e-12:
                    continue
                if not self.dyn_ok(st.samples, node.t):
                    continue
                old = self.best.get(key)
                if old is not None and g >= old[0] - 1e-12:
                    continue
                h = self.h(st.end, t1)
                if not math.isfinite(h):
                    continue
                d = node.d + self.soft_hits(st.samples, node.t)
                child = _Node(st.end, t1, g, g + h, d, node, [st], self.new_seq(), key)
                if old is not None:
                    old[1].dead = True
                self.best[key] = (g, child)
                self.push(child)
        return SearchResult(None, expansions=self.expansions, status="exhausted")

    @staticmethod
    def _trajectory(node: _Node, start: State) -> Trajectory:
        chunks = []
        while node is not None:
            chunks.append(node.steps)
            node = node.parent
        steps = [s for chunk in reversed(chunks) for s in chunk]
        return Trajectory(-1, start, steps)


def _check_endpoints(model: MotionModel, start: State, goal: State) -> None:
    if not model.pose_free(start):
        raise ValueError(f"start {start.as_tuple()} is in collision")
    if not model.pose_free(goal):
        raise ValueError(f"goal {goal.as_tuple()} is in collision")


def plan_constrained(
    start: State,
    goal: State,
    model: MotionModel,
    dyn: DynamicObstacles | None = None,
    fp: FocalParams = FocalParams(),
    start_time: int = 0,
    cfg: SearchConfig = SearchConfig(),
    field: HolonomicField | None = None,
    deadline: float | None = None,
) -> SearchResult:
    """Spatiotemporal focal hybrid A* from ``start`` at ``start_time``."""
    _check_endpoints(model, start, goal)
    dyn = dyn if dyn is not None else DynamicObstacles(model.n_sub)
    if math.isfinite(fp.window) and dyn.constraints:
        horizon = start_time + int(fp.window)
        kept = [(t, c) for t, cs in dyn.constraints.items() if t < horizon for c in cs]
        dyn = DynamicObstacles(model.n_sub, dyn.hard, dyn.soft, kept, dyn.soft_horizon)
    if not dyn.empty:
        smp = np.tile(np.array(start.as_tuple()), (model.n_sub + 2, 1))
        hard = dyn.hard_at(start_time)
        if hard.shape[0] and K.any_hit(smp[:1], hard[:, :1], model.off, model.hl, model.hw, model.reach2, model.reach_step2):
            raise ValueError("start collides with a dynamic obstacle at the start time")
    if field is None:
        field = build_holonomic_field(goal, model.ws)
    search = _Search(model, goal, field, dyn, fp.w, cfg, deadline)
    return search.run(start, start_time)


def plan_vanilla(
    start: State,
    goal: State,
    model: MotionModel,
    cfg: SearchConfig = SearchConfig(),
    field: HolonomicField | None = None,
    deadline: float | None = None,
) -> SearchResult:
    """Time-free hybrid A* with analytic Reeds-Shepp completion."""
    return plan_constrained(start, goal, model, None, FocalParams(1.0), 0, cfg, field, deadline)
