"""Command-line interface: ``python -m carplan <command> ...``.

Exit codes: 0 success, 1 planner failure (or validation violations),
2 invalid input, 3 timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from .config import ENV_VAR, Config, load_config
from .io import (
    BenchRow,
    bench_csv,
    load_scenario,
    load_trajectories,
    save_scenario,
    save_trajectories,
)
from .render import RenderOptions, render_svg
from .simulation import (
    ALGOS,
    MapSpec,
    PlannerSpec,
    corridor_instance,
    generate_instances,
    run_lifelong,
    run_static,
    validate,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3

PRESETS = {
    "static": dict(width=100.0, height=100.0, obstacles=50, n=60),
    "lifelong": dict(width=50.0, height=50.0, obstacles=10, n=20),
}


class InputError(Exception):
    pass


def _config(args) -> Config:
    try:
        return load_config(args.config)
    except (OSError, ValueError, TypeError) as e:
        raise InputError(f"config: {e}") from e


def _scenario(path: str, cfg: Config):
    try:
        inst = load_scenario(path, cfg)
    except (OSError, ValueError) as e:
        raise InputError(str(e)) from e
    errs = inst.check()
    if errs:
        raise InputError(f"{path}: " + "; ".join(errs[:5]))
    return inst


def _planner(args) -> PlannerSpec:
    try:
        return PlannerSpec(args.algo, getattr(args, "subopt", None), getattr(args, "window", None))
    except ValueError as e:
        raise InputError(str(e)) from e


def _metrics_json(m) -> str:
    return json.dumps(asdict(m), sort_keys=True)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_generate(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    if args.preset == "corridor":
        out.mkdir(parents=True, exist_ok=True)
        save_scenario(corridor_instance(cfg=cfg), out / "corridor.json")
        print(f"wrote {out / 'corridor.json'}")
        return EXIT_OK
    pre = PRESETS[args.preset]
    spec = MapSpec(
        args.width if args.width is not None else pre["width"],
        args.height if args.height is not None else pre["height"],
        args.obstacles if args.obstacles is not None else pre["obstacles"],
        args.radius,
    )
    n = args.n if args.n is not None else pre["n"]
    goals = args.goals if args.goals is not None else (1 if args.preset == "static" else 100)
    try:
        insts = generate_instances(spec, n, args.count, args.seed, cfg, goals)
    except (RuntimeError, ValueError) as e:
        raise InputError(str(e)) from e
    out.mkdir(parents=True, exist_ok=True)
    for inst in insts:
        save_scenario(inst, out / f"{inst.name}.json")
    print(f"wrote {len(insts)} scenarios to {out}")
    return EXIT_OK


def _write_outputs(args, inst, trajs) -> None:
    if trajs is None:
        return
    if args.out:
        save_trajectories(trajs, args.out)
    if getattr(args, "svg", None):
        Path(args.svg).write_text(render_svg(inst, trajs, RenderOptions(title=inst.name)), encoding="utf-8")


def cmd_solve(args) -> int:
    cfg = _config(args)
    inst = _scenario(args.scenario, cfg)
    if inst.lifelong:
        raise InputError("scenario has goal queues; use the lifelong command")
    res = run_static(inst, _planner(args), cfg, args.time_limit, args.max_steps)
    _write_outputs(args, inst, res.trajectories)
    print(_metrics_json(res.metrics))
    if res.metrics.success:
        return EXIT_OK
    return EXIT_TIMEOUT if res.metrics.status == "timeout" else EXIT_FAIL


def cmd_lifelong(args) -> int:
    cfg = _config(args)
    inst = _scenario(args.scenario, cfg)
    res = run_lifelong(inst, _planner(args), cfg, args.time_limit, args.max_steps)
    _write_outputs(args, inst, res.trajectories)
    print(_metrics_json(res.metrics))
    if res.metrics.status == "timeout":
        return EXIT_TIMEOUT
    return EXIT_OK if res.metrics.throughput > 0 else EXIT_FAIL


def cmd_validate(args) -> int:
    cfg = _config(args)
    inst = _scenario(args.scenario, cfg)
    try:
        trajs = load_trajectories(args.trajectories, inst.kinematics, cfg.n_sub)
    except (OSError, ValueError, KeyError) as e:
        raise InputError(f"{args.trajectories}: {e}") from e
    rep = validate(inst, trajs, cfg.n_sub, check_goals=not (args.partial or inst.lifelong))
    print(rep.summary())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_render(args) -> int:
    cfg = _config(args)
    inst = _scenario(args.scenario, cfg)
    trajs = None
    if args.trajectories:
        try:
            trajs = load_trajectories(args.trajectories, inst.kinematics, cfg.n_sub)
        except (OSError, ValueError, KeyError) as e:
            raise InputError(f"{args.trajectories}: {e}") from e
    svg = render_svg(inst, trajs, RenderOptions(args.scale, args.stride, title=inst.name))
    Path(args.out).write_text(svg, encoding="utf-8")
    return EXIT_OK


def _bench_one(job):
    path, algo, subopt, window, lifelong, time_limit, max_steps, cfg = job
    inst = load_scenario(path, cfg)
    spec = PlannerSpec(algo, subopt, window)
    if lifelong:
        m = run_lifelong(inst, spec, cfg, time_limit, max_steps).metrics
    else:
        m = run_static(inst, spec, cfg, time_limit, max_steps).metrics
    return BenchRow(inst.name or Path(path).stem, algo, inst.n, m)


def cmd_bench(args) -> int:
    cfg = _config(args)
    files = sorted(Path(args.directory).glob("*.json"))
    if not files:
        raise InputError(f"no *.json scenarios in {args.directory}")
    spec = _planner(args)
    for f in files:
        _scenario(str(f), cfg)
    jobs = [(str(f), spec.algo, spec.subopt, spec.window, args.lifelong, args.time_limit, args.max_steps, cfg) for f in files]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            rows = list(ex.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    rows.sort(key=lambda r: r.instance)
    text = bench_csv(rows, with_runtime=not args.no_runtime)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="carplan", description="Multi-robot planning for car-like robots.")
    ap.add_argument("--config", help=f"JSON file of config overrides (default: ${ENV_VAR} if set)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write seeded random scenarios")
    g.add_argument("--preset", choices=sorted(PRESETS) + ["corridor"], default="static",
                   help="static: 100x100, 50 obstacles, n=60; lifelong: 50x50, 10 obstacles, n=20, "
                   "100 goals each; corridor: the two-robot head-on corridor")
    g.add_argument("--width", type=float)
    g.add_argument("--height", type=float)
    g.add_argument("--obstacles", type=int, help="number of obstacle discs")
    g.add_argument("--radius", type=float, default=1.0, help="obstacle radius")
    g.add_argument("-n", type=int, help="number of robots")
    g.add_argument("--goals", type=int, help="goals per robot (>1 makes lifelong scenarios)")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    def planner_args(p, lifelong: bool):
        p.add_argument("scenario")
        p.add_argument("--algo", choices=ALGOS, default="pbcr-v1" if lifelong else "pbcr-v2")
        p.add_argument("--subopt", type=float, help="ECCR suboptimality ratio (default from config)")
        p.add_argument("--time-limit", type=float, help="wall-clock seconds")
        p.add_argument("--max-steps", type=int)
        p.add_argument("--out", help="trajectory CSV to write")
        p.add_argument("--svg", help="SVG picture to write")

    s = sub.add_parser("solve", help="solve a static scenario")
    planner_args(s, False)
    s.set_defaults(func=cmd_solve)

    lf = sub.add_parser("lifelong", help="run a lifelong scenario")
    planner_args(lf, True)
    lf.add_argument("--window", type=int, help="ECCR replanning window (default from config)")
    lf.set_defaults(func=cmd_lifelong)

    v = sub.add_parser("validate", help="check trajectories against a scenario")
    v.add_argument("scenario")
    v.add_argument("trajectories")
    v.add_argument("--partial", action="store_true", help="do not require robots to end at their goals")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("render", help="draw a scenario and optional trajectories as SVG")
    r.add_argument("scenario")
    r.add_argument("trajectories", nargs="?")
    r.add_argument("--out", required=True)
    r.add_argument("--scale", type=float, default=8.0, help="pixels per map unit")
    r.add_argument("--stride", type=int, default=5, help="footprint every N steps (0: none)")
    r.set_defaults(func=cmd_render)

    b = sub.add_parser("bench", help="run one planner over a directory of scenarios and emit CSV")
    b.add_argument("directory")
    b.add_argument("--algo", choices=ALGOS, default="pbcr-v2")
    b.add_argument("--subopt", type=float)
    b.add_argument("--window", type=int)
    b.add_argument("--lifelong", action="store_true")
    b.add_argument("--time-limit", type=float)
    b.add_argument("--max-steps", type=int)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--no-runtime", action="store_true", help="leave the runtime column empty (for diffing)")
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
