"""Throughput and runtime of lifelong runs (tasks completed within a step budget).

The defaults are the scaled-down setting (50x50, 10 obstacles, 20 robots,
1000 steps).  ``--full`` switches to 5000 steps and a 600 s limit.
"""

import argparse

from carplan.config import load_config
from carplan.simulation import ALGOS, MapSpec, PlannerSpec, generate_instance, run_lifelong


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[20])
    ap.add_argument("--size", type=float, default=50.0)
    ap.add_argument("--obstacles", type=int, default=10)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--full", action="store_true", help="5000 steps, 600 s wall-clock limit")
    ap.add_argument("--seed", type=int, default=9)
    ap.add_argument("--algos", nargs="+", choices=ALGOS, default=["pbcr-v1", "eccr"])
    ap.add_argument("--window", type=int)
    ap.add_argument("--config")
    args = ap.parse_args()
    cfg = load_config(args.config)
    steps = cfg.lifelong_max_steps if args.full else args.steps
    limit = cfg.lifelong_time_limit if args.full else None
    print("n,algo,steps,throughput,runtime_s,stalls,status")
    for n in args.n:
        inst = generate_instance(MapSpec(args.size, args.size, args.obstacles), n, args.seed, cfg,
                                 goals_per_robot=max(100, steps // 10))
        for algo in args.algos:
            res = run_lifelong(inst, PlannerSpec(algo, window=args.window), cfg, limit, steps)
            m = res.metrics
            print(f"{n},{algo},{res.steps},{m.throughput},{m.runtime:.2f},{res.stalls},{m.status}", flush=True)


if __name__ == "__main__":
    main()
