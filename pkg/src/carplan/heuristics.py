"""Distance heuristic, holonomic grid field, visit counts and the Q-function."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import DiscretizationParams, DiscreteState, State, Workspace, discretize
from .reeds_shepp import rs_length

# Grid moves with max(|dx|, |dy|) <= 3 and coprime components.  The widest
# angular gap between consecutive moves is atan(1/3), so a grid path
# overestimates the straight-line length by at most 1 / cos(atan(1/3) / 2).
_BASE_MOVES = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3)]
MOVES = sorted({(sx * a, sy * b) for a, b in _BASE_MOVES for sx in (1, -1) for sy in (1, -1)})
METRIC_RATIO = 1.0 / math.cos(0.5 * math.atan(1.0 / 3.0))


@dataclass(frozen=True, eq=False)
class HolonomicField:
    """Obstacle-aware point-robot distances to ``goal`` on a square grid.

    ``costs[iy, ix]`` is the grid path length from cell (ix, iy) to the goal
    cell; blocked or disconnected cells hold ``inf``.
    """

    goal: State
    cell: float
    costs: np.ndarray

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ny, nx = self.costs.shape
        return min(max(int(x // self.cell), 0), nx - 1), min(max(int(y // self.cell), 0), ny - 1)

    def center(self, ix: int, iy: int) -> tuple[float, float]:
        return ((ix + 0.5) * self.cell, (iy + 0.5) * self.cell)

    def lookup(self, v: State) -> float:
        """Lower-bound estimate of the obstacle-aware distance from ``v``.

        The raw grid value is shrunk by the stencil's worst-case metric
        ratio and by the offsets of ``v`` and the goal from their cell
        centres.  If ``v``'s own cell is blocked (a valid pose can sit in a
        cell whose centre is inside a disc) the best finite neighbour is used.
        """
        ix, iy = self.cell_of(v.x, v.y)
        gx, gy = self.cell_of(self.goal.x, self.goal.y)
        gc = self.center(gx, gy)
        slack = math.hypot(self.goal.x - gc[0], self.goal.y - gc[1])
        c = self.costs[iy, ix]
        if math.isfinite(c):
            cx, cy = self.center(ix, iy)
            return max(0.0, c / METRIC_RATIO - math.hypot(v.x - cx, v.y - cy) - slack)
        ny, nx = self.costs.shape
        best = math.inf
        for jy in range(max(iy - 1, 0), min(iy + 2, ny)):
            for jx in range(max(ix - 1, 0), min(ix + 2, nx)):
                c = self.costs[jy, jx]
                if math.isfinite(c):
                    cx, cy = self.center(jx, jy)
                    best = min(best, c / METRIC_RATIO - math.hypot(v.x - cx, v.y - cy) - slack)
        return max(0.0, best) if math.isfinite(best) else math.inf


def _blocked_mask(ws: Workspace, cell: float) -> np.ndarray:
    # Discs are eroded by one cell so that the grid graph relaxes the true
    # free space: a path hugging a disc never needs a blocked cell.
    nx, ny = max(1, math.ceil(ws.width / cell)), max(1, math.ceil(ws.height / cell))
    xs = (np.arange(nx) + 0.5) * cell
    ys = (np.arange(ny) + 0.5) * cell
    X, Y = np.meshgrid(xs, ys)
    blocked = np.zeros((ny, nx), dtype=bool)
    for o in ws.obstacles:
        r = o.radius - cell
        if r > 0:
            blocked |= (X - o.x) ** 2 + (Y - o.y) ** 2 <= r * r
    return blocked


def _grid_graph(blocked: np.ndarray) -> csr_matrix:
    """Sparse adjacency over free cells; long moves need every crossed cell free."""
    ny, nx = blocked.shape
    free = ~blocked
    rows, cols, wts = [], [], []
    iy, ix = np.mgrid[0:ny, 0:nx]
    for dx, dy in MOVES:
        ok = free.copy()
        jx, jy = ix + dx, iy + dy
        inside = (jx >= 0) & (jx < nx) & (jy >= 0) & (jy < ny)
        ok &= inside
        # cells crossed by the centre-to-centre segment
        n = 8 * max(abs(dx), abs(dy))
        for k in range(1, n):
            f = k / n
            px = np.floor(ix + 0.5 + f * dx).astype(int)
            py = np.floor(iy + 0.5 + f * dy).astype(int)
            px = np.clip(px, 0, nx - 1)
            py = np.clip(py, 0, ny - 1)
            ok &= free[py, px]
        jxc, jyc = np.clip(jx, 0, nx - 1), np.clip(jy, 0, ny - 1)
        ok &= free[jyc, jxc]
        src = (iy * nx + ix)[ok]
        dst = (jyc * nx + jxc)[ok]
        rows.append(src)
        cols.append(dst)
        wts.append(np.full(len(src), math.hypot(dx, dy)))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    wts = np.concatenate(wts)
    return csr_matrix((wts, (rows, cols)), shape=(nx * ny, nx * ny))


@lru_cache(maxsize=16)
def _workspace_graph(ws: Workspace, cell: float) -> tuple[np.ndarray, csr_matrix]:
    blocked = _blocked_mask(ws, cell)
    return blocked, _grid_graph(blocked)


@lru_cache(maxsize=1024)
def _field_costs(ws: Workspace, cell: float, gx: int, gy: int) -> np.ndarray:
    blocked, graph = _workspace_graph(ws, cell)
    if blocked[gy, gx]:
        # the goal pose is valid but its cell centre is inside a disc
        b = blocked.copy()
        b[gy, gx] = False
        graph = _grid_graph(b)
    ny, nx = blocked.shape
    dist = dijkstra(graph, directed=True, indices=gy * nx + gx)
    dist = dist.reshape(ny, nx) * cell
    dist.flags.writeable = False
    return dist


def build_holonomic_field(g: State, ws: Workspace, cell: float = 1.0) -> HolonomicField:
    for o in ws.obstacles:
        if math.hypot(g.x - o.x, g.y - o.y) <= o.radius:
            raise ValueError(f"goal {g.as_tuple()} lies inside an obstacle")
    if not (0.0 <= g.x <= ws.width and 0.0 <= g.y <= ws.height):
        raise ValueError(f"goal {g.as_tuple()} outside the workspace")
    nx, ny = max(1, math.ceil(ws.width / cell)), max(1, math.ceil(ws.height / cell))
    gx = min(max(int(g.x // cell), 0), nx - 1)
    gy = min(max(int(g.y // cell), 0), ny - 1)
    return HolonomicField(g, cell, _field_costs(ws, cell, gx, gy))


def dist_h(v: State, g: State, field: HolonomicField | None, r: float) -> float:
    """max(holonomic, Reeds-Shepp length, Euclidean distance)."""
    eu = math.hypot(v.x - g.x, v.y - g.y)
    rs = rs_length(v, g, r)
    holo = field.lookup(v) if field is not None else 0.0
    return max(holo, rs, eu)


class CountTable:
    """Per-robot visit counts over discretized states."""

    def __init__(self) -> None:
        self.counts: Counter[DiscreteState] = Counter()

    def visit(self, v: State, d: DiscretizationParams) -> None:
        self.counts[discretize(v, d)] += 1

    def get(self, v: State, d: DiscretizationParams) -> int:
        return self.counts.get(discretize(v, d), 0)

    def clear(self) -> None:
        self.counts.clear()

    def __len__(self) -> int:
        return len(self.counts)


def count_visit(t: CountTable, v: State, d: DiscretizationParams) -> None:
    t.visit(v, d)


@dataclass(frozen=True)
class QWeights:
    """Weights of the Q-function.

    ``alpha`` and ``beta`` are rules: each evaluates to ``scale * lam *
    step_cost`` for the candidate being scored.
    """

    lam: float = 0.3
    alpha_scale: float = 1.0
    beta_scale: float = 1.0

    def __post_init__(self) -> None:
        if min(self.lam, self.alpha_scale, self.beta_scale) < 0:
            raise ValueError("Q weights must be nonnegative")

    def alpha(self, step_cost: float) -> float:
        return self.alpha_scale * self.lam * step_cost

    def beta(self, step_cost: float) -> float:
        return self.beta_scale * self.lam * step_cost


def q_value(
    v: State | None,
    step_cost: float,
    is_greedy: bool,
    is_goal: bool,
    distH: float,
    visits: int,
    wts: QWeights,
) -> float:
    """Q = -distH - lam*cost + alpha*[greedy] - beta_eff*visits."""
    q = -distH - wts.lam * step_cost
    if is_greedy:
        q += wts.alpha(step_cost)
    if not is_goal:
        q -= wts.beta(step_cost) * visits
    return q
