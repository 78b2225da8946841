"""Success rate and runtime of the planners over seeded static instances.

Example:
    python scripts/static_sweep.py --n 20 40 60 --count 20 --algos pbcr-v0 pbcr-v1 pbcr-v2
"""

import argparse
import statistics

from carplan.config import load_config
from carplan.simulation import ALGOS, MapSpec, PlannerSpec, generate_instances, run_static


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[20, 40, 60])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--size", type=float, default=100.0)
    ap.add_argument("--obstacles", type=int, default=50)
    ap.add_argument("--algos", nargs="+", choices=ALGOS, default=["pbcr-v0", "pbcr-v1", "pbcr-v2"])
    ap.add_argument("--time-limit", type=float)
    ap.add_argument("--config")
    args = ap.parse_args()
    cfg = load_config(args.config)
    spec = MapSpec(args.size, args.size, args.obstacles)
    print("n,algo,success_rate,mean_runtime_s,mean_arrival_fraction,mean_makespan_solved")
    for n in args.n:
        insts = generate_instances(spec, n, args.count, args.seed, cfg)
        for algo in args.algos:
            ms = [run_static(i, PlannerSpec(algo), cfg, args.time_limit).metrics for i in insts]
            ok = [m for m in ms if m.success]
            mk = statistics.mean(m.makespan for m in ok) if ok else float("nan")
            print(f"{n},{algo},{len(ok) / len(ms):.3f},{statistics.mean(m.runtime for m in ms):.3f},"
                  f"{statistics.mean(m.arrival_fraction for m in ms):.3f},{mk:.2f}", flush=True)


if __name__ == "__main__":
    main()
