"""Independent reference computations used by the test-suite.

Nothing here imports the planner kernels; the Reeds-Shepp oracle solves every
word's boundary equations numerically, and the kinematics oracle integrates
the Ackermann ODE with a high-order Runge-Kutta scheme.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

L, S, R = 1, 0, -1  # heading-rate sign of each segment kind

# slot roles
FREE, FIXED, STRAIGHT, DET, TIED = range(5)


def _words_1d():
    """Words containing one straight: the straight length is solved linearly."""
    words = []
    for a, c in itertools.product((L, R), repeat=2):
        for dirs in itertools.product((1, -1), repeat=3):  # C S C
            words.append(([a, S, c], list(dirs), [FREE, STRAIGHT, DET]))
    for a, c in itertools.product((L, R), repeat=2):
        for dirs in itertools.product((1, -1), repeat=4):
            # C C(pi/2) S C
            words.append(([a, -a, S, c], list(dirs), [FREE, FIXED, STRAIGHT, DET]))
            # C S C(pi/2) C
            words.append(([a, S, c, -c], list(dirs), [FREE, STRAIGHT, FIXED, DET]))
    for a, c in itertools.product((L, R), repeat=2):
        for dirs in itertools.product((1, -1), repeat=5):
            # C C(pi/2) S C(pi/2) C
            words.append(([a, -a, S, c, -c], list(dirs), [FREE, FIXED, STRAIGHT, FIXED, DET]))
    return words


def _words_2d():
    words = []
    for a in (L, R):
        for dirs in itertools.product((1, -1), repeat=3):
            words.append(([a, -a, a], list(dirs), [FREE, FREE, DET]))
        for dirs in itertools.product((1, -1), repeat=4):
            words.append(([a, -a, a, -a], list(dirs), [FREE, FREE, TIED, DET]))
    return words


def _pack(words):
    n = len(words)
    kinds = np.zeros((5, n))
    dirs = np.zeros((5, n))
    roles = np.full((5, n), -1)
    nseg = np.zeros(n, dtype=int)
    for j, (k, d, r) in enumerate(words):
        nseg[j] = len(k)
        kinds[: len(k), j] = k
        dirs[: len(k), j] = d
        roles[: len(k), j] = r
    return kinds, dirs, roles, nseg


_W1 = _pack(_words_1d())
_W2 = _pack(_words_2d())


def _propagate(kinds, dirs, params, active):
    """End pose from the origin for segment params (5, N); unit radius."""
    n = params.shape[1]
    x = np.zeros(n)
    y = np.zeros(n)
    th = np.zeros(n)
    for i in range(5):
        k = kinds[i]
        d = dirs[i] * params[i] * active[i]
        arc = k != 0
        th1 = th + k * d
        ks = np.where(arc, k, 1.0)
        x = x + np.where(arc, (np.sin(th1) - np.sin(th)) / ks, d * np.cos(th))
        y = y + np.where(arc, -(np.cos(th1) - np.cos(th)) / ks, d * np.sin(th))
        th = th1
    return x, y, th


def _det_param(kinds, dirs, params, roles, phi):
    """Fill the DET slot so the end heading matches phi modulo 2pi."""
    acc = np.zeros(params.shape[1])
    det_slot = np.zeros(params.shape[1], dtype=int)
    for i in range(5):
        is_det = roles[i] == DET
        acc = acc + np.where(is_det | (roles[i] < 0), 0.0, kinds[i] * dirs[i] * params[i])
        det_slot = np.where(is_det, i, det_slot)
    cols = np.arange(params.shape[1])
    kd = kinds[det_slot, cols] * dirs[det_slot, cols]
    params[det_slot, cols] = np.mod(kd * (phi - acc), TWO_PI)


def _solve_1d(gx, gy, phi, grid=360):
    kinds, dirs, roles, _ = _W1
    nw = kinds.shape[1]
    t = np.linspace(0.0, TWO_PI, grid)

    def evaluate(tv, cols):
        k = kinds[:, cols]
        d = dirs[:, cols]
        r = roles[:, cols]
        p = np.zeros((5, len(cols)))
        p[0] = tv
        p = np.where(r == FIXED, HALF_PI, p)
        _det_param(k, d, p, r, phi)
        active = (r >= 0).astype(float)
        ax, ay, _ = _propagate(k, d, p, active)
        # heading along the straight: sum of arcs before it
        hs = np.zeros(len(cols))
        seen = np.zeros(len(cols), dtype=bool)
        sdir = np.zeros(len(cols))
        for i in range(5):
            is_s = r[i] == STRAIGHT
            sdir = np.where(is_s, d[i], sdir)
            seen = seen | is_s
            hs = hs + np.where(seen | (r[i] < 0), 0.0, k[i] * d[i] * p[i])
        ex, ey = np.cos(hs), np.sin(hs)
        rx, ry = gx - ax, gy - ay
        g = ex * ry - ey * rx
        u = sdir * (ex * rx + ey * ry)
        return g, u, p

    cols = np.repeat(np.arange(nw), grid)
    tt = np.tile(t, nw)
    g, _, _ = evaluate(tt, cols)
    g = g.reshape(nw, grid)
    lo_w, lo_i = np.nonzero((g[:, :-1] * g[:, 1:] <= 0.0) & (np.abs(g[:, :-1] - g[:, 1:]) < 1.0))
    if len(lo_w) == 0:
        return math.inf
    a = t[lo_i].copy()
    b = t[lo_i + 1].copy()
    ga = g[lo_w, lo_i].copy()
    for _ in range(48):
        m = 0.5 * (a + b)
        gm, _, _ = evaluate(m, lo_w)
        left = ga * gm <= 0.0
        b = np.where(left, m, b)
        a = np.where(left, a, m)
        ga = np.where(left, ga, gm)
    root = 0.5 * (a + b)
    g, u, p = evaluate(root, lo_w)
    r = roles[:, lo_w]
    p = np.where(r == STRAIGHT, u, p)
    # verify the full boundary condition with the solved straight
    x, y, th = _propagate(kinds[:, lo_w], dirs[:, lo_w], p, (r >= 0).astype(float))
    ok = u >= -1e-9
    err = np.hypot(x - gx, y - gy)
    herr = np.abs(np.angle(np.exp(1j * (th - phi))))
    ok &= (err < 1e-7) & (herr < 1e-7)
    if not ok.any():
        return math.inf
    lengths = np.where(r >= 0, np.abs(p), 0.0).sum(axis=0)
    return float(lengths[ok].min())


def _solve_2d(gx, gy, phi, grid=40, iters=40):
    kinds, dirs, roles, _ = _W2
    nw = kinds.shape[1]
    g1 = np.linspace(0.0, TWO_PI, grid + 1)

    def residual(t, u, cols):
        k = kinds[:, cols]
        d = dirs[:, cols]
        r = roles[:, cols]
        p = np.zeros((5, len(cols)))
        p[0] = t
        p[1] = u
        p = np.where(r == TIED, u, p)
        _det_param(k, d, p, r, phi)
        x, y, _ = _propagate(k, d, p, (r >= 0).astype(float))
        return x - gx, y - gy, p

    T, U = np.meshgrid(g1, g1, indexing="ij")
    cols = np.repeat(np.arange(nw), (grid + 1) ** 2)
    t = np.tile(T.ravel(), nw)
    u = np.tile(U.ravel(), nw)
    rx, ry, _ = residual(t, u, cols)
    nrm = np.hypot(rx, ry).reshape(nw, grid + 1, grid + 1)
    # seeds: local minima of the residual norm on each word's grid, edges included
    pad = np.pad(nrm, ((0, 0), (1, 1), (1, 1)), constant_values=np.inf)
    is_min = nrm < 1.0
    for di, dj in ((0, 1), (2, 1), (1, 0), (1, 2)):
        is_min &= nrm <= pad[:, di:di + nrm.shape[1], dj:dj + nrm.shape[2]]
    keep = is_min.ravel()
    t, u, cols = t[keep], u[keep], cols[keep]
    if len(cols) == 0:
        return math.inf
    h = 1e-7
    for _ in range(iters):
        fx, fy, _ = residual(t, u, cols)
        ax, ay, _ = residual(t + h, u, cols)
        bx, by, _ = residual(t, u + h, cols)
        j11, j21 = (ax - fx) / h, (ay - fy) / h
        j12, j22 = (bx - fx) / h, (by - fy) / h
        det = j11 * j22 - j12 * j21
        det = np.where(np.abs(det) < 1e-12, 1e-12, det)
        dt = -(j22 * fx - j12 * fy) / det
        du = -(-j21 * fx + j11 * fy) / det
        step = np.hypot(dt, du)
        scale = np.where(step > 0.3, 0.3 / np.maximum(step, 1e-300), 1.0)
        # Newton steps stay inside the parameter box so boundary roots are reachable
        t = np.clip(t + scale * dt, 0.0, TWO_PI)
        u = np.clip(u + scale * du, 0.0, TWO_PI)
    fx, fy, p = residual(t, u, cols)
    r = roles[:, cols]
    ok = (np.hypot(fx, fy) < 1e-9) & (t >= -1e-9) & (u >= -1e-9) & (t <= TWO_PI) & (u <= TWO_PI)
    if not ok.any():
        return math.inf
    lengths = np.where(r >= 0, np.abs(p), 0.0).sum(axis=0)
    return float(lengths[ok].min())


def rs_length_oracle(frm, to, radius: float) -> float:
    """Minimum over all enumerated words of the numerically solved path length."""
    dx, dy = to[0] - frm[0], to[1] - frm[1]
    c, s = math.cos(frm[2]), math.sin(frm[2])
    gx, gy = (c * dx + s * dy) / radius, (-s * dx + c * dy) / radius
    phi = math.remainder(to[2] - frm[2], TWO_PI)
    if abs(gx) < 1e-12 and abs(gy) < 1e-12 and abs(phi) < 1e-12:
        return 0.0
    best = min(_solve_1d(gx, gy, phi), _solve_2d(gx, gy, phi))
    return best * radius


def ackermann_rk4(x, y, th, u, steer, wheelbase, duration, steps=2000):
    """Integrate x' = u cos th, y' = u sin th, th' = u tan(steer) / wheelbase."""
    h = duration / steps
    rate = math.tan(steer) / wheelbase

    def f(state):
        _, _, t = state
        return np.array([u * math.cos(t), u * math.sin(t), u * rate])

    z = np.array([x, y, th], dtype=float)
    for _ in range(steps):
        k1 = f(z)
        k2 = f(z + 0.5 * h * k1)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        z = z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return z


def point_in_box(px, py, box, tol=0.0):
    c, s = math.cos(box.heading), math.sin(box.heading)
    dx, dy = px - box.cx, py - box.cy
    lx, ly = c * dx + s * dy, -s * dx + c * dy
    return abs(lx) <= box.half_length + tol and abs(ly) <= box.half_width + tol


def box_grid_points(box, n=100):
    """n x n grid of points covering a box, boundary included."""
    c, s = math.cos(box.heading), math.sin(box.heading)
    a = np.linspace(-box.half_length, box.half_length, n)
    b = np.linspace(-box.half_width, box.half_width, n)
    A, B = np.meshgrid(a, b)
    return box.cx + c * A - s * B, box.cy + s * A + c * B


def boxes_overlap_sampled(a, b, n=100):
    """Dense-sampling overlap oracle: any grid point of one box inside the other."""
    for p, q in ((a, b), (b, a)):
        X, Y = box_grid_points(p, n)
        c, s = math.cos(q.heading), math.sin(q.heading)
        dx, dy = X - q.cx, Y - q.cy
        lx, ly = c * dx + s * dy, -s * dx + c * dy
        if np.any((np.abs(lx) <= q.half_length) & (np.abs(ly) <= q.half_width)):
            return True
    return False
