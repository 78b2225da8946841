"""Decentralized one-step planner: priority inheritance with backtracking for cars.

Each timestep every robot picks one motion primitive.  Robots are visited in
priority order; a robot whose chosen step sweeps over an undecided
neighbour's current footprint lends its priority to that neighbour, which
must then move out of the way (recursively).  A failed child makes the parent
retract its choice and try the next candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .geometry import State, discretize
from .heuristics import CountTable, HolonomicField, QWeights, build_holonomic_field, dist_h, q_value
from .hybrid_astar import SearchConfig, plan_vanilla
from .primitives import MotionModel, Primitive, Step, free_step
from .reeds_shepp import rs_shortest

GOAL_TOL = 1e-6


@dataclass(frozen=True)
class PbcrVariant:
    tag: str
    count_enabled: bool
    clear_on_goal: bool

    def __post_init__(self) -> None:
        if self.tag == "v0" and self.count_enabled:
            raise ValueError("v0 has no count heuristic")


V0 = PbcrVariant("v0", False, False)
V1 = PbcrVariant("v1", True, True)
V2 = PbcrVariant("v2", True, False)
VARIANTS = {"v0": V0, "v1": V1, "v2": V2}


@dataclass(frozen=True)
class PbcrConfig:
    variant: PbcrVariant = V2
    weights: QWeights = QWeights()
    v0_keeps_alpha: bool = True
    count_wait: bool = True
    gm_search: SearchConfig = SearchConfig(node_budget=5000)
    reconnect_lookahead: int = 8
    invocation_cap_factor: int = 20


@dataclass
class RobotRuntime:
    id: int
    current: State
    goal: State
    elapsed: int = 0
    counts: CountTable = field(default_factory=CountTable)
    last_primitive: Primitive | None = None
    at_goal: bool = False
    field: HolonomicField | None = None
    plan: list[State] | None = None  # cached single-robot path to the goal
    cursor: int = 0
    failed_from: State | None = None

    def set_goal(self, goal: State, ws) -> None:
        self.goal = goal
        self.field = build_holonomic_field(goal, ws)
        self.plan = None
        self.cursor = 0
        self.failed_from = None
        self.at_goal = self.current.pose_error(goal) <= GOAL_TOL


@dataclass
class _Cand:
    step: Step
    q: float


class PbcrPlanner:
    """Holds the per-robot runtime and advances all robots one timestep at a time."""

    def __init__(self, model: MotionModel, starts, goals, cfg: PbcrConfig = PbcrConfig()):
        self.model = model
        self.cfg = cfg
        self.robots = [RobotRuntime(i, s, g) for i, (s, g) in enumerate(zip(starts, goals))]
        for r in self.robots:
            r.set_goal(r.goal, model.ws)
        self.invocations = 0
        self.vanilla_calls = 0
        self.vanilla_expansions = 0

    # -- priorities ---------------------------------------------------------
    def distance(self, r: RobotRuntime, s: State) -> float:
        return dist_h(s, r.goal, r.field, self.model.kin.r_m)

    def update_priorities(self) -> list[int]:
        """Robot ids by descending (elapsed, distH, -id)."""
        keys = [(-r.elapsed, -self.distance(r, r.current), r.id) for r in self.robots]
        return [k[2] for k in sorted(keys)]

    # -- greedy motion primitive -----------------------------------------------
    def _shot_free(self, frm: State, to: State):
        m = self.model
        path = rs_shortest(frm, to, m.kin.r_m)
        total = path.length
        n = max(2, int(math.ceil(total / m.kin.step_len)) * (m.n_sub + 1) + 1)
        if total > 0 and not m.samples_free(path.sample_many(np.linspace(0.0, total, n))):
            return None
        return path

    def _first_piece(self, path, to: State) -> Step | None:
        m = self.model
        total = path.length
        if total <= m.kin.step_len:
            end = to
        else:
            x, y, th = path.sample_many([m.kin.step_len])[0]
            end = State(float(x), float(y), float(th))
        st = free_step(Primitive.GM, path.start, end, m.kin, m.n_sub)
        if st.arc_len > m.kin.step_len + 1e-9 or not m.samples_free(st.samples):
            return None
        return st

    def greedy_step(self, r: RobotRuntime) -> Step | None:
        """First ``u_m * dt`` of the single-robot shortest path to the goal."""
        m = self.model
        s = r.current
        if s.pose_error(r.goal) <= GOAL_TOL:
            return free_step(Primitive.GM, s, s, m.kin, m.n_sub)
        path = self._shot_free(s, r.goal)
        if path is not None:
            return self._first_piece(path, r.goal)
        for attempt in range(2):
            if r.plan is not None:
                st = self._reconnect(r, s)
                if st is not None:
                    return st
            if attempt == 1 or (r.failed_from is not None and r.failed_from.pose_error(s) < 1e-12):
                return None
            res = plan_vanilla(s, r.goal, m, self.cfg.gm_search, r.field)
            self.vanilla_calls += 1
            self.vanilla_expansions += res.expansions
            if not res.ok or not res.trajectory.steps:
                r.failed_from = s
                r.plan = None
                return None
            r.plan = res.trajectory.states
            r.cursor = 0
        return None

    def _reconnect(self, r: RobotRuntime, s: State) -> Step | None:
        """GM toward the farthest nearby waypoint of the cached path with a free RS link."""
        step = self.model.kin.step_len
        hi = min(r.cursor + self.cfg.reconnect_lookahead, len(r.plan) - 1)
        for j in range(hi, r.cursor, -1):
            wp = r.plan[j]
            path = self._shot_free(s, wp)
            if path is None or path.length > (j - r.cursor + 1) * step * 1.5:
                continue
            st = self._first_piece(path, wp)
            if st is not None:
                if path.length <= step:
                    r.cursor = j
                return st
        return None

    # -- candidate set ------------------------------------------------------
    def candidates(self, r: RobotRuntime) -> list[_Cand]:
        m = self.model
        cfg = self.cfg
        steps = m.successors(r.current)
        gm = self.greedy_step(r)
        if gm is not None:
            gcell = discretize(gm.end, m.disc)
            steps = [
                st for st in steps
                if not (st.end.pose_error(gm.end) <= GOAL_TOL and discretize(st.end, m.disc) == gcell)
            ]
            steps.append(gm)
        goal_cell = discretize(r.goal, m.disc)
        wts = cfg.weights
        if not cfg.variant.count_enabled:
            wts = QWeights(wts.lam, wts.alpha_scale if cfg.v0_keeps_alpha else 0.0, 0.0)
        out = []
        for st in steps:
            cost = m.cost(r.last_primitive, st)
            dh = self.distance(r, st.end)
            if not math.isfinite(dh):
                out.append(_Cand(st, -math.inf))
                continue
            visits = r.counts.get(st.end, m.disc) if cfg.variant.count_enabled else 0
            is_goal = discretize(st.end, m.disc) == goal_cell
            out.append(_Cand(st, q_value(st.end, cost, st.primitive is Primitive.GM, is_goal, dh, visits, wts)))
        out.sort(key=lambda c: (-c.q, c.step.primitive.order))
        return out

    # -- one timestep -------------------------------------------------------
    def pibt_loop(self) -> list[Step]:
        """Decide one collision-free step for every robot."""
        m = self.model
        n = len(self.robots)
        order = self.update_priorities()
        rank = {rid: k for k, rid in enumerate(order)}
        pos = np.array([[r.current.x, r.current.y] for r in self.robots]).reshape(n, 2)
        d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(-1)
        rad2 = m.neighbor_radius**2
        nbrs = [sorted((int(j) for j in np.nonzero(d2[i] <= rad2)[0] if j != i), key=rank.__getitem__) for i in range(n)]
        cand_cache: dict[int, list[_Cand]] = {}
        decided: dict[int, Step] = {}
        log: list[int] = []
        undecided = set(range(n))
        cap = self.cfg.invocation_cap_factor * max(n, 1)
        self.invocations = 0
        off, hl, hw, reach2 = m.off, m.hl, m.hw, m.reach2

        def pibt(i: int, j: int | None, vj: Step | None) -> bool:
            self.invocations += 1
            if j is not None and self.invocations > cap:
                return False
            undecided.discard(i)
            if i not in cand_cache:
                cand_cache[i] = self.candidates(self.robots[i])
            for c in cand_cache[i]:
                smp = c.step.samples
                if any(
                    k in decided and K.samples_collide(smp, decided[k].samples, off, hl, hw, reach2) for k in nbrs[i]
                ):
                    continue
                if j is not None:
                    pj = self.robots[j].current
                    if K.samples_hit_pose(smp[-1:], pj.x, pj.y, pj.theta, off, hl, hw, reach2):
                        continue
                mark = len(log)
                decided[i] = c.step
                log.append(i)
                ok = True
                for k in nbrs[i]:
                    if k not in undecided:
                        continue
                    pk = self.robots[k].current
                    if K.samples_hit_pose(smp, pk.x, pk.y, pk.theta, off, hl, hw, reach2) and not pibt(k, i, c.step):
                        ok = False
                        break
                if ok:
                    return True
                for rid in log[mark:]:
                    del decided[rid]
                    undecided.add(rid)
                del log[mark:]
                undecided.discard(i)
            undecided.add(i)
            return False

        while undecided:
            i = min(undecided, key=rank.__getitem__)
            if not pibt(i, None, None):
                raise RuntimeError(f"robot {i} found no feasible step, not even WAIT")
        return [decided[i] for i in range(n)]

    def apply(self, steps: list[Step]) -> list[int]:
        """Move every robot along its decided step; return ids that just arrived."""
        m = self.model
        arrived = []
        for r, st in zip(self.robots, steps):
            was = r.at_goal
            r.current = st.end
            r.last_primitive = st.primitive if st.arc_len > 0 or st.primitive is Primitive.WAIT else r.last_primitive
            r.at_goal = r.current.pose_error(r.goal) <= GOAL_TOL
            if self.cfg.variant.count_enabled and (st.arc_len > 0 or self.cfg.count_wait):
                r.counts.visit(r.current, m.disc)
            if r.at_goal:
                r.elapsed = 0
                if not was:
                    arrived.append(r.id)
                    if self.cfg.variant.clear_on_goal:
                        r.counts.clear()
            else:
                r.elapsed += 1
        return arrived

    def step(self) -> tuple[list[Step], list[int]]:
        steps = self.pibt_loop()
        return steps, self.apply(steps)

    def all_at_goal(self) -> bool:
        return all(r.at_goal for r in self.robots)
