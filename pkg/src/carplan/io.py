"""Scenario (JSON) and trajectory / benchmark (CSV) files.

Angles are degrees in every file and radians in memory; the conversion
happens here and nowhere else.  Floats are written with ``repr`` so that a
write-read cycle reproduces the same doubles and reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import dataclass

from .config import Config
from .geometry import CircleObstacle, DiscretizationParams, RobotShape, State, Workspace
from .primitives import KinematicParams, Primitive, Step, Trajectory, connect_motion, primitive_samples
from .simulation import Instance, Metrics

TRAJ_HEADER = ["robot", "t", "x", "y", "theta_deg", "primitive", "arc_len"]
BENCH_HEADER = [
    "instance", "algo", "n", "success", "runtime_s", "makespan", "makespan_steps",
    "flowtime", "arrival_fraction", "throughput", "hl_exp", "ll_exp",
]


def _pose_out(s: State) -> list[float]:
    return [s.x, s.y, math.degrees(s.theta)]


def _pose_in(v) -> State:
    if len(v) != 3:
        raise ValueError(f"pose needs [x, y, theta_deg], got {v!r}")
    return State(float(v[0]), float(v[1]), math.radians(float(v[2])))


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------
def instance_to_dict(inst: Instance) -> dict:
    ws, sh, k, d = inst.workspace, inst.shape, inst.kinematics, inst.discretization
    return {
        "name": inst.name,
        "seed": inst.seed,
        "map": {"width": ws.width, "height": ws.height},
        "obstacles": [{"x": o.x, "y": o.y, "r": o.radius} for o in ws.obstacles],
        "robot": {"length": sh.length, "width": sh.width, "wheelbase": sh.wheelbase},
        "kinematics": {"u_m": k.u_m, "phi_m": math.degrees(k.phi_m), "r_m": k.r_m, "dt": k.dt},
        "discretization": {"dx": d.dx, "dy": d.dy, "dtheta": math.degrees(d.dtheta)},
        "robots": [
            {"start": _pose_out(s), "goals": [_pose_out(g) for g in q]}
            for s, q in zip(inst.starts, inst.goal_queues)
        ],
    }


def instance_from_dict(data: dict, cfg: Config = Config()) -> Instance:
    """Build an Instance; missing robot/kinematics/discretization keys take ``cfg`` values.

    A missing ``dt`` is derived as ``r_m * dtheta / u_m``.
    """
    try:
        mp = data["map"]
        obstacles = tuple(CircleObstacle(float(o["x"]), float(o["y"]), float(o.get("r", 1.0))) for o in data.get("obstacles", []))
        ws = Workspace(float(mp["width"]), float(mp["height"]), obstacles)
        rb = data.get("robot", {})
        shape = RobotShape(
            float(rb.get("length", cfg.robot_length)), float(rb.get("width", cfg.robot_width)),
            float(rb.get("wheelbase", cfg.wheelbase)),
        )
        dd = data.get("discretization", {})
        disc = DiscretizationParams(
            float(dd.get("dx", cfg.dx)), float(dd.get("dy", cfg.dy)), math.radians(float(dd.get("dtheta", cfg.dtheta_deg)))
        )
        kk = data.get("kinematics", {})
        u_m = float(kk.get("u_m", cfg.u_m))
        r_m = float(kk.get("r_m", cfg.r_m))
        dt = kk.get("dt", cfg.dt)
        dt = r_m * disc.dtheta / u_m if dt is None else float(dt)
        kin = KinematicParams(u_m, math.radians(float(kk.get("phi_m", cfg.phi_m_deg))), r_m, dt)
        robots = data.get("robots", [])
        starts = tuple(_pose_in(r["start"]) for r in robots)
        queues = tuple(tuple(_pose_in(g) for g in r["goals"]) for r in robots)
        seed = data.get("seed")
        return Instance(ws, starts, queues, shape, kin, disc, None if seed is None else int(seed), str(data.get("name", "")))
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed scenario: {e!r}") from e


def save_scenario(inst: Instance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=1)
        fh.write("\n")


def load_scenario(path: str | os.PathLike, cfg: Config = Config()) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(data, dict):
        raise ValueError(f"{path}: scenario must be a JSON object")
    return instance_from_dict(data, cfg)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------
def trajectories_to_csv(trajs: list[Trajectory]) -> str:
    """Row ``t = 0`` is the start (primitive ``START``); row t is the pose after step t."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJ_HEADER)
    for tr in trajs:
        w.writerow([tr.robot, 0, *map(repr, _pose_out(tr.start)), "START", repr(0.0)])
        for t, st in enumerate(tr.steps, 1):
            w.writerow([tr.robot, t, *map(repr, _pose_out(st.end)), st.primitive.value, repr(float(st.arc_len))])
    return buf.getvalue()


def save_trajectories(trajs: list[Trajectory], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trajectories_to_csv(trajs))


def trajectories_from_csv(text: str, kin: KinematicParams, n_sub: int = 5) -> list[Trajectory]:
    """Rebuild Trajectories; swept samples are recomputed from labels and endpoints."""
    rows = list(csv.DictReader(_io.StringIO(text)))
    if rows and set(TRAJ_HEADER) - set(rows[0]):
        raise ValueError(f"trajectory file needs columns {TRAJ_HEADER}")
    by_robot: dict[int, list[dict]] = {}
    for r in rows:
        by_robot.setdefault(int(r["robot"]), []).append(r)
    out = []
    for rid in sorted(by_robot):
        rs = sorted(by_robot[rid], key=lambda r: int(r["t"]))
        if int(rs[0]["t"]) != 0 or rs[0]["primitive"] != "START":
            raise ValueError(f"robot {rid}: first row must be t=0 START")
        if [int(r["t"]) for r in rs] != list(range(len(rs))):
            raise ValueError(f"robot {rid}: timesteps must be consecutive")
        start = _pose_in([rs[0]["x"], rs[0]["y"], rs[0]["theta_deg"]])
        tr = Trajectory(rid, start)
        prev = start
        for r in rs[1:]:
            end = _pose_in([r["x"], r["y"], r["theta_deg"]])
            try:
                p = Primitive(r["primitive"])
            except ValueError as e:
                raise ValueError(f"robot {rid}: unknown primitive {r['primitive']!r}") from e
            if p.is_moving or p is Primitive.WAIT:
                smp = primitive_samples(prev, p, kin, n_sub)
            else:
                smp, _ = connect_motion(prev, end, kin, n_sub)
            tr.steps.append(Step(p, prev, end, smp, float(r["arc_len"])))
            prev = end
        out.append(tr)
    return out


def load_trajectories(path: str | os.PathLike, kin: KinematicParams, n_sub: int = 5) -> list[Trajectory]:
    with open(path, encoding="utf-8") as fh:
        return trajectories_from_csv(fh.read(), kin, n_sub)


# ---------------------------------------------------------------------------
# benchmark rows
# ---------------------------------------------------------------------------
@dataclass
class BenchRow:
    instance: str
    algo: str
    n: int
    metrics: Metrics

    def cells(self, with_runtime: bool = True) -> list[str]:
        m = self.metrics
        return [
            self.instance, self.algo, str(self.n), str(int(m.success)),
            repr(m.runtime) if with_runtime else "",
            repr(m.makespan), str(m.makespan_steps), repr(m.flowtime), repr(m.arrival_fraction),
            str(m.throughput), str(m.hl_expansions), str(m.ll_expansions),
        ]


def summary_cells(rows: list[BenchRow], with_runtime: bool = True) -> list[str]:
    """Success rate and means over all rows (metrics means over successful runs)."""
    k = len(rows)
    ok = [r.metrics for r in rows if r.metrics.success]

    def mean(xs):
        xs = list(xs)
        return repr(sum(xs) / len(xs)) if xs else ""

    allm = [r.metrics for r in rows]
    return [
        "SUMMARY", rows[0].algo if rows else "", mean(r.n for r in rows),
        repr(len(ok) / k) if k else "", mean(m.runtime for m in allm) if with_runtime else "",
        mean(m.makespan for m in ok), mean(m.makespan_steps for m in ok), mean(m.flowtime for m in ok),
        mean(m.arrival_fraction for m in allm), mean(m.throughput for m in allm),
        mean(m.hl_expansions for m in allm), mean(m.ll_expansions for m in allm),
    ]


def bench_csv(rows: list[BenchRow], summary: bool = True, with_runtime: bool = True) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for r in rows:
        w.writerow(r.cells(with_runtime))
    if summary and rows:
        w.writerow(summary_cells(rows, with_runtime))
    return buf.getvalue()
