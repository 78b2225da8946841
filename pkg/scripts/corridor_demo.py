"""Two robots meeting head-on in a walled corridor.

Without visit counts (pbcr-v0) the pair oscillates until the step cap; with
counts (pbcr-v1, pbcr-v2) they get past each other.  Writes one SVG per
planner into ``--out``.
"""

import argparse
from pathlib import Path

from carplan.render import RenderOptions, render_svg
from carplan.simulation import PlannerSpec, corridor_instance, run_static, validate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gap", type=float, default=6.0, help="free lane width between the walls")
    ap.add_argument("--out", default="corridor_out")
    args = ap.parse_args()
    inst = corridor_instance(gap=args.gap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for algo in ("pbcr-v0", "pbcr-v1", "pbcr-v2"):
        res = run_static(inst, PlannerSpec(algo))
        m = res.metrics
        rep = validate(inst, res.trajectories, check_goals=m.success)
        print(f"{algo}: success={m.success} steps={m.makespan_steps} status={m.status} valid={rep.ok}")
        svg = render_svg(inst, res.trajectories, RenderOptions(scale=12, footprint_stride=10, title=algo))
        (out / f"{algo}.svg").write_text(svg, encoding="utf-8")


if __name__ == "__main__":
    main()
