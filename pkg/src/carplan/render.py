"""Static SVG pictures of an instance and its trajectories.

The map's y axis points up, so everything is drawn inside a group flipped
about the map's horizontal centre line.  Colours depend only on robot ids.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .geometry import State, footprint
from .primitives import Trajectory
from .simulation import Instance


@dataclass(frozen=True)
class RenderOptions:
    scale: float = 8.0  # pixels per map unit
    footprint_stride: int = 5  # draw a footprint every this many steps; 0 disables
    draw_starts: bool = True
    draw_goals: bool = True
    line_width: float = 0.25  # map units
    title: str = ""


def robot_color(i: int) -> str:
    """Deterministic, well-spread hue per robot id (golden-ratio stepping)."""
    h = (i * 0.618033988749895) % 1.0
    r, g, b = colorsys.hls_to_rgb(h, 0.45, 0.75)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _f(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def _box_points(s: State, inst: Instance) -> str:
    corners = footprint(s, inst.shape).corners()
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in corners)


def render_svg(instance: Instance, trajectories: list[Trajectory] | None = None, options: RenderOptions = RenderOptions()) -> str:
    ws = instance.workspace
    sc = options.scale
    W, H = ws.width, ws.height
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(W * sc)}" height="{_f(H * sc)}" '
        f'viewBox="0 0 {_f(W)} {_f(H)}">'
    ]
    if options.title:
        out.append(f"<title>{escape(options.title)}</title>")
    out.append(f'<g transform="matrix(1 0 0 -1 0 {_f(H)})">')
    out.append(f'<rect class="frame" x="0" y="0" width="{_f(W)}" height="{_f(H)}" fill="white" stroke="black" stroke-width="0.2"/>')
    for o in ws.obstacles:
        out.append(f'<circle class="obstacle" cx="{_f(o.x)}" cy="{_f(o.y)}" r="{_f(o.radius)}" fill="#555555"/>')
    lw = _f(options.line_width)
    for tr in trajectories or []:
        col = robot_color(tr.robot)
        pts = [tr.start] + [st.end for st in tr.steps]
        if options.footprint_stride > 0:
            for k in range(0, len(pts), options.footprint_stride):
                out.append(
                    f'<polygon class="footprint" points="{_box_points(pts[k], instance)}" '
                    f'fill="none" stroke="{col}" stroke-width="0.08" stroke-opacity="0.6"/>'
                )
        if len(pts) > 1:
            path = " ".join(f"{_f(s.x + instance.shape.center_offset * math.cos(s.theta))},"
                            f"{_f(s.y + instance.shape.center_offset * math.sin(s.theta))}" for s in pts)
            out.append(f'<polyline class="path" data-robot="{tr.robot}" points="{path}" fill="none" stroke="{col}" stroke-width="{lw}"/>')
    for i in range(instance.n):
        col = robot_color(i)
        if options.draw_starts:
            out.append(f'<polygon class="start" points="{_box_points(instance.starts[i], instance)}" fill="{col}" fill-opacity="0.35" stroke="{col}" stroke-width="0.1"/>')
        if options.draw_goals:
            out.append(f'<polygon class="goal" points="{_box_points(instance.goals[i], instance)}" fill="none" stroke="{col}" stroke-width="0.15" stroke-dasharray="0.4 0.3"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
