"""Shortest bounded-curvature paths with forward and backward motion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as K
from .geometry import State, wrap_angle


class SegmentKind(Enum):
    LEFT = "L"
    STRAIGHT = "S"
    RIGHT = "R"


_CODE_TO_KIND = {K.SEG_LEFT: SegmentKind.LEFT, K.SEG_STRAIGHT: SegmentKind.STRAIGHT, K.SEG_RIGHT: SegmentKind.RIGHT}
_KIND_TO_CODE = {v: k for k, v in _CODE_TO_KIND.items()}


@dataclass(frozen=True, slots=True)
class RSSegment:
    kind: SegmentKind
    forward: bool
    param: float  # radians for arcs, map units for straights

    def length(self, radius: float) -> float:
        return self.param if self.kind is SegmentKind.STRAIGHT else self.param * radius


@dataclass(frozen=True)
class RSPath:
    segments: tuple[RSSegment, ...]
    turn_radius: float
    start: State
    goal: State | None = None

    @property
    def length(self) -> float:
        return sum(s.length(self.turn_radius) for s in self.segments)

    @property
    def word(self) -> str:
        return "".join(s.kind.value + ("+" if s.forward else "-") for s in self.segments)

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        types = np.zeros(5, dtype=np.int64)
        params = np.zeros(5)
        for i, seg in enumerate(self.segments):
            types[i] = _KIND_TO_CODE[seg.kind]
            p = seg.param / self.turn_radius if seg.kind is SegmentKind.STRAIGHT else seg.param
            params[i] = p if seg.forward else -p
        return types, params

    def sample_many(self, dists) -> np.ndarray:
        types, params = self._tables()
        s = self.start
        return K.rs_sample_many(s.x, s.y, s.theta, types, params, self.turn_radius, np.asarray(dists, dtype=np.float64))


def _normalized(frm: State, to: State, radius: float) -> tuple[float, float, float]:
    dx, dy = to.x - frm.x, to.y - frm.y
    c, s = math.cos(frm.theta), math.sin(frm.theta)
    return (c * dx + s * dy) / radius, (-s * dx + c * dy) / radius, to.theta - frm.theta


def _degenerate(frm: State, to: State) -> bool:
    return abs(to.x - frm.x) < 1e-9 and abs(to.y - frm.y) < 1e-9 and abs(wrap_angle(to.theta - frm.theta)) < 1e-9


def rs_shortest(frm: State, to: State, radius: float) -> RSPath:
    if radius <= 0:
        raise ValueError("turn radius must be positive")
    if _degenerate(frm, to):
        return RSPath((), radius, frm, frm)
    x, y, phi = _normalized(frm, to, radius)
    typ, params, _ = K.rs_solve(x, y, phi)
    segs = []
    for code, p in zip(K.RS_TYPES[typ], params):
        if code == K.SEG_NONE:
            break
        if abs(p) < 1e-12:
            continue
        kind = _CODE_TO_KIND[int(code)]
        mag = abs(p) * radius if kind is SegmentKind.STRAIGHT else abs(p)
        segs.append(RSSegment(kind, p >= 0.0, float(mag)))
    return RSPath(tuple(segs), radius, frm, to)


def rs_length(frm: State, to: State, radius: float) -> float:
    if radius <= 0:
        raise ValueError("turn radius must be positive")
    return float(K.rs_length_raw(frm.x, frm.y, frm.theta, to.x, to.y, to.theta, radius))


def rs_sample(p: RSPath, s: float) -> State:
    total = p.length
    if s < -1e-12 or s > total + 1e-9:
        raise ValueError(f"arc length {s} outside [0, {total}]")
    s = min(max(s, 0.0), total)
    if s == 0.0:
        return p.start
    if s == total and p.goal is not None:
        return p.goal
    x, y, th = p.sample_many([s])[0]
    return State(float(x), float(y), float(th))


def rs_truncate_first(p: RSPath, d: float, n_interior: int = 5) -> tuple[State, list[State]]:
    """Pose at arc length ``min(d, len)`` plus evenly spaced samples up to it.

    When the whole path fits in ``d`` the returned pose is the exact goal the
    path was built for (not the round-off-affected sampled end).
    """
    if d <= 0:
        raise ValueError("truncation distance must be positive")
    total = p.length
    reach = min(d, total)
    dists = np.linspace(0.0, reach, n_interior + 2)
    arr = p.sample_many(dists) if total > 0 else np.tile(np.array(p.start.as_tuple()), (n_interior + 2, 1))
    samples = [State(float(a), float(b), float(c)) for a, b, c in arr]
    samples[0] = p.start
    if total <= d and p.goal is not None:
        samples[-1] = p.goal
    return samples[-1], samples
