"""Numba-compiled hot loops: Reeds-Shepp word solvers, motion sampling, collision.

Everything here works on plain floats and float64 arrays so it can be called
from the planners' inner loops.  Sample arrays have shape (k, 3) holding
(x, y, theta) rear-axle poses.
"""

import math

import numpy as np
from numba import njit

PI = math.pi
TWO_PI = 2.0 * math.pi
RS_TOL = 1e-9

# segment codes used by the Reeds-Shepp tables
SEG_NONE = 0
SEG_LEFT = 1
SEG_STRAIGHT = 2
SEG_RIGHT = 3

# the 18 word shapes; reflections/time flips/backwards variants reuse them
RS_TYPES = np.array(
    [
        [1, 3, 1, 0, 0],
        [3, 1, 3, 0, 0],
        [1, 3, 1, 3, 0],
        [3, 1, 3, 1, 0],
        [1, 3, 2, 1, 0],
        [3, 1, 2, 3, 0],
        [1, 2, 3, 1, 0],
        [3, 2, 1, 3, 0],
        [1, 3, 2, 3, 0],
        [3, 1, 2, 1, 0],
        [3, 2, 3, 1, 0],
        [1, 2, 1, 3, 0],
        [1, 2, 3, 0, 0],
        [3, 2, 1, 0, 0],
        [1, 2, 1, 0, 0],
        [3, 2, 3, 0, 0],
        [1, 3, 2, 1, 3],
        [3, 1, 2, 3, 1],
    ],
    dtype=np.int64,
)


@njit(cache=True)
def wrap(a):
    a = (a + PI) % TWO_PI - PI
    if a >= PI:
        a -= TWO_PI
    return a


@njit(cache=True)
def _mod2pi(x):
    # symmetric range (-pi, pi], as used by the word formulas
    v = np.fmod(x, TWO_PI)
    if v < -PI:
        v += TWO_PI
    elif v > PI:
        v -= TWO_PI
    return v


@njit(cache=True)
def _tau_omega(u, v, xi, eta, phi):
    delta = _mod2pi(u - v)
    a = math.sin(u) - math.sin(delta)
    b = math.cos(u) - math.cos(delta) - 1.0
    t1 = math.atan2(eta * a - xi * b, xi * a + eta * b)
    t2 = 2.0 * (math.cos(delta) - math.cos(v) - math.cos(u)) + 3.0
    if t2 < 0:
        tau = _mod2pi(t1 + PI)
    else:
        tau = _mod2pi(t1)
    omega = _mod2pi(tau - u + v - phi)
    return tau, omega


@njit(cache=True)
def _lp_sp_lp(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u = math.hypot(xi, eta)
    t = math.atan2(eta, xi)
    if t >= -RS_TOL:
        v = _mod2pi(phi - t)
        if v >= -RS_TOL:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_sp_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    u1 = xi * xi + eta * eta
    t1 = math.atan2(eta, xi)
    if u1 >= 4.0:
        u = math.sqrt(u1 - 4.0)
        theta = math.atan2(2.0, u)
        t = _mod2pi(t1 + theta)
        v = _mod2pi(t - phi)
        if t >= -RS_TOL and v >= -RS_TOL:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_l(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u1 = math.hypot(xi, eta)
    theta = math.atan2(eta, xi)
    if u1 <= 4.0:
        u = -2.0 * math.asin(0.25 * u1)
        t = _mod2pi(theta + 0.5 * u + PI)
        v = _mod2pi(phi - t + u)
        if t >= -RS_TOL and u <= RS_TOL:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rup_lum_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = 0.25 * (2.0 + math.sqrt(xi * xi + eta * eta))
    if rho <= 1.0:
        u = math.acos(rho)
        t, v = _tau_omega(u, -u, xi, eta, phi)
        if t >= -RS_TOL and v <= RS_TOL:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rum_lum_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = (20.0 - xi * xi - eta * eta) / 16.0
    if rho >= 0.0 and rho <= 1.0:
        u = -math.acos(rho)
        if u >= -0.5 * PI:
            t, v = _tau_omega(u, u, xi, eta, phi)
            if t >= -RS_TOL and v >= -RS_TOL:
                return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_sm_lm(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = math.hypot(xi, eta)
    theta = math.atan2(eta, xi)
    if rho >= 2.0:
        r = math.sqrt(rho * rho - 4.0)
        u = 2.0 - r
        t = _mod2pi(theta + math.atan2(r, -2.0))
        v = _mod2pi(phi - 0.5 * PI - t)
        if t >= -RS_TOL and u <= RS_TOL and v <= RS_TOL:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_sm_rm(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = math.hypot(-eta, xi)
    theta = math.atan2(xi, -eta)
    if rho >= 2.0:
        t = theta
        u = 2.0 - rho
        v = _mod2pi(t + 0.5 * PI - phi)
        if t >= -RS_TOL and u <= RS_TOL and v <= RS_TOL:
            return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _lp_rm_s_lm_rp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = math.hypot(xi, eta)
    if rho >= 2.0:
        u = 4.0 - math.sqrt(rho * rho - 4.0)
        if u <= RS_TOL:
            t = _mod2pi(math.atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta))
            v = _mod2pi(t - phi)
            if t >= -RS_TOL and v >= -RS_TOL:
                return True, t, u, v
    return False, 0.0, 0.0, 0.0


@njit(cache=True)
def _consider(best, best_params, ok, typ, p0, p1, p2, p3, p4):
    # keeps the first word reaching the minimum; later words must be
    # strictly shorter (beyond round-off) to replace it
    if not ok:
        return
    length = abs(p0) + abs(p1) + abs(p2) + abs(p3) + abs(p4)
    if length < best[1] - 1e-12:
        best[0] = typ
        best[1] = length
        best_params[0] = p0
        best_params[1] = p1
        best_params[2] = p2
        best_params[3] = p3
        best_params[4] = p4


@njit(cache=True)
def rs_solve(x, y, phi):
    """Shortest word for unit turning radius from (0,0,0) to (x, y, phi).

    Returns (type index into RS_TYPES, signed segment params[5], length).
    Negative params mean backward motion.
    """
    best = np.array([-1.0, np.inf])
    bp = np.zeros(5)
    hp = 0.5 * PI

    # CSC
    ok, t, u, v = _lp_sp_lp(x, y, phi)
    _consider(best, bp, ok, 14, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_lp(-x, y, -phi)
    _consider(best, bp, ok, 14, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_lp(x, -y, -phi)
    _consider(best, bp, ok, 15, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_lp(-x, -y, phi)
    _consider(best, bp, ok, 15, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(x, y, phi)
    _consider(best, bp, ok, 12, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(-x, y, -phi)
    _consider(best, bp, ok, 12, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(x, -y, -phi)
    _consider(best, bp, ok, 13, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_sp_rp(-x, -y, phi)
    _consider(best, bp, ok, 13, -t, -u, -v, 0.0, 0.0)

    # CCC
    ok, t, u, v = _lp_rm_l(x, y, phi)
    _consider(best, bp, ok, 0, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-x, y, -phi)
    _consider(best, bp, ok, 0, -t, -u, -v, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(x, -y, -phi)
    _consider(best, bp, ok, 1, t, u, v, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-x, -y, phi)
    _consider(best, bp, ok, 1, -t, -u, -v, 0.0, 0.0)
    xb = x * math.cos(phi) + y * math.sin(phi)
    yb = x * math.sin(phi) - y * math.cos(phi)
    ok, t, u, v = _lp_rm_l(xb, yb, phi)
    _consider(best, bp, ok, 0, v, u, t, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-xb, yb, -phi)
    _consider(best, bp, ok, 0, -v, -u, -t, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(xb, -yb, -phi)
    _consider(best, bp, ok, 1, v, u, t, 0.0, 0.0)
    ok, t, u, v = _lp_rm_l(-xb, -yb, phi)
    _consider(best, bp, ok, 1, -v, -u, -t, 0.0, 0.0)

    # CCCC
    ok, t, u, v = _lp_rup_lum_rm(x, y, phi)
    _consider(best, bp, ok, 2, t, u, -u, v, 0.0)
    ok, t, u, v = _lp_rup_lum_rm(-x, y, -phi)
    _consider(best, bp, ok, 2, -t, -u, u, -v, 0.0)
    ok, t, u, v = _lp_rup_lum_rm(x, -y, -phi)
    _consider(best, bp, ok, 3, t, u, -u, v, 0.0)
    ok, t, u, v = _lp_rup_lum_rm(-x, -y, phi)
    _consider(best, bp, ok, 3, -t, -u, u, -v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(x, y, phi)
    _consider(best, bp, ok, 2, t, u, u, v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(-x, y, -phi)
    _consider(best, bp, ok, 2, -t, -u, -u, -v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(x, -y, -phi)
    _consider(best, bp, ok, 3, t, u, u, v, 0.0)
    ok, t, u, v = _lp_rum_lum_rp(-x, -y, phi)
    _consider(best, bp, ok, 3, -t, -u, -u, -v, 0.0)

    # CCSC and its backwards twin CSCC
    ok, t, u, v = _lp_rm_sm_lm(x, y, phi)
    _consider(best, bp, ok, 4, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-x, y, -phi)
    _consider(best, bp, ok, 4, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(x, -y, -phi)
    _consider(best, bp, ok, 5, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-x, -y, phi)
    _consider(best, bp, ok, 5, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(x, y, phi)
    _consider(best, bp, ok, 8, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-x, y, -phi)
    _consider(best, bp, ok, 8, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(x, -y, -phi)
    _consider(best, bp, ok, 9, t, -hp, u, v, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-x, -y, phi)
    _consider(best, bp, ok, 9, -t, hp, -u, -v, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(xb, yb, phi)
    _consider(best, bp, ok, 6, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-xb, yb, -phi)
    _consider(best, bp, ok, 6, -v, -u, hp, -t, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(xb, -yb, -phi)
    _consider(best, bp, ok, 7, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_lm(-xb, -yb, phi)
    _consider(best, bp, ok, 7, -v, -u, hp, -t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(xb, yb, phi)
    _consider(best, bp, ok, 10, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-xb, yb, -phi)
    _consider(best, bp, ok, 10, -v, -u, hp, -t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(xb, -yb, -phi)
    _consider(best, bp, ok, 11, v, u, -hp, t, 0.0)
    ok, t, u, v = _lp_rm_sm_rm(-xb, -yb, phi)
    _consider(best, bp, ok, 11, -v, -u, hp, -t, 0.0)

    # CCSCC
    ok, t, u, v = _lp_rm_s_lm_rp(x, y, phi)
    _consider(best, bp, ok, 16, t, -hp, u, -hp, v)
    ok, t, u, v = _lp_rm_s_lm_rp(-x, y, -phi)
    _consider(best, bp, ok, 16, -t, hp, -u, hp, -v)
    ok, t, u, v = _lp_rm_s_lm_rp(x, -y, -phi)
    _consider(best, bp, ok, 17, t, -hp, u, -hp, v)
    ok, t, u, v = _lp_rm_s_lm_rp(-x, -y, phi)
    _consider(best, bp, ok, 17, -t, hp, -u, hp, -v)

    return int(best[0]), bp, best[1]


@njit(cache=True)
def rs_length_raw(x0, y0, th0, x1, y1, th1, radius):
    dx = x1 - x0
    dy = y1 - y0
    if abs(dx) < 1e-9 and abs(dy) < 1e-9 and abs(wrap(th1 - th0)) < 1e-9:
        return 0.0
    c = math.cos(th0)
    s = math.sin(th0)
    x = (c * dx + s * dy) / radius
    y = (-s * dx + c * dy) / radius
    typ, bp, length = rs_solve(x, y, th1 - th0)
    return length * radius


@njit(cache=True)
def rs_pose_at(x0, y0, th0, types, params, radius, dist):
    """Pose after travelling ``dist`` (map units) along a Reeds-Shepp word."""
    x = 0.0
    y = 0.0
    phi = 0.0
    remaining = dist / radius
    for i in range(5):
        code = types[i]
        if code == SEG_NONE or remaining <= 0.0:
            break
        seg = params[i]
        if seg < 0.0:
            v = -min(-seg, remaining)
            remaining -= -seg
        else:
            v = min(seg, remaining)
            remaining -= seg
        if code == SEG_LEFT:
            x += math.sin(phi + v) - math.sin(phi)
            y += -math.cos(phi + v) + math.cos(phi)
            phi = phi + v
        elif code == SEG_RIGHT:
            x += -math.sin(phi - v) + math.sin(phi)
            y += math.cos(phi - v) - math.cos(phi)
            phi = phi - v
        else:
            x += v * math.cos(phi)
            y += v * math.sin(phi)
    c = math.cos(th0)
    s = math.sin(th0)
    return (
        x0 + radius * (c * x - s * y),
        y0 + radius * (s * x + c * y),
        wrap(th0 + phi),
    )


@njit(cache=True)
def rs_sample_many(x0, y0, th0, types, params, radius, dists):
    out = np.empty((dists.shape[0], 3))
    for k in range(dists.shape[0]):
        px, py, pt = rs_pose_at(x0, y0, th0, types, params, radius, dists[k])
        out[k, 0] = px
        out[k, 1] = py
        out[k, 2] = pt
    return out


@njit(cache=True)
def primitive_pose(x, y, th, direction, steer, dist, radius):
    """Closed-form Ackermann motion at constant controls.

    ``direction`` is +1/-1, ``steer`` +1 (left), 0 (straight) or -1 (right);
    ``dist`` is the unsigned distance travelled.
    """
    if steer == 0:
        d = direction * dist
        return x + d * math.cos(th), y + d * math.sin(th), wrap(th)
    dth = direction * steer * dist / radius
    th1 = th + dth
    rs = radius / steer
    return (
        x + rs * (math.sin(th1) - math.sin(th)),
        y - rs * (math.cos(th1) - math.cos(th)),
        wrap(th1),
    )


@njit(cache=True)
def primitive_samples(x, y, th, direction, steer, dist, radius, n_interior):
    k = n_interior + 2
    out = np.empty((k, 3))
    for i in range(k):
        f = i / (k - 1)
        px, py, pt = primitive_pose(x, y, th, direction, steer, dist * f, radius)
        out[i, 0] = px
        out[i, 1] = py
        out[i, 2] = pt
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = wrap(th)
    return out


@njit(cache=True)
def box_box(ax, ay, ath, bx, by, bth, off, hl, hw):
    """Closed SAT test between two equal-shape robot bodies given rear-axle poses."""
    ca = math.cos(ath)
    sa = math.sin(ath)
    cb = math.cos(bth)
    sb = math.sin(bth)
    acx = ax + off * ca
    acy = ay + off * sa
    bcx = bx + off * cb
    bcy = by + off * sb
    dx = bcx - acx
    dy = bcy - acy
    # axes: a-long, a-lat, b-long, b-lat
    for k in range(4):
        if k == 0:
            ux, uy = ca, sa
        elif k == 1:
            ux, uy = -sa, ca
        elif k == 2:
            ux, uy = cb, sb
        else:
            ux, uy = -sb, cb
        ra = hl * abs(ca * ux + sa * uy) + hw * abs(-sa * ux + ca * uy)
        rb = hl * abs(cb * ux + sb * uy) + hw * abs(-sb * ux + cb * uy)
        if abs(dx * ux + dy * uy) > ra + rb:
            return False
    return True


@njit(cache=True)
def pose_static_free(x, y, th, off, hl, hw, obs, width, height):
    c = math.cos(th)
    s = math.sin(th)
    cx = x + off * c
    cy = y + off * s
    ex = hl * abs(c) + hw * abs(s)
    ey = hl * abs(s) + hw * abs(c)
    if cx - ex < 0.0 or cx + ex > width or cy - ey < 0.0 or cy + ey > height:
        # axis-aligned extent is exact for the corner bounds
        return False
    reach = math.sqrt(hl * hl + hw * hw)
    for i in range(obs.shape[0]):
        ox = obs[i, 0] - cx
        oy = obs[i, 1] - cy
        r = obs[i, 2]
        if abs(ox) > reach + r or abs(oy) > reach + r:
            continue
        lx = c * ox + s * oy
        ly = -s * ox + c * oy
        qx = min(max(lx, -hl), hl)
        qy = min(max(ly, -hw), hw)
        if (lx - qx) ** 2 + (ly - qy) ** 2 <= r * r:
            return False
    return True


@njit(cache=True)
def samples_static_free(samples, off, hl, hw, obs, width, height):
    for i in range(samples.shape[0]):
        if not pose_static_free(samples[i, 0], samples[i, 1], samples[i, 2], off, hl, hw, obs, width, height):
            return False
    return True


@njit(cache=True)
def samples_collide(a, b, off, hl, hw, reach2):
    """Index-aligned (same instant) collision between two sample arrays.

    ``reach2`` is the squared distance between reference points beyond which
    two bodies cannot touch.
    """
    n = min(a.shape[0], b.shape[0])
    for i in range(n):
        dx = a[i, 0] - b[i, 0]
        dy = a[i, 1] - b[i, 1]
        if dx * dx + dy * dy > reach2:
            continue
        if box_box(a[i, 0], a[i, 1], a[i, 2], b[i, 0], b[i, 1], b[i, 2], off, hl, hw):
            return True
    return False


@njit(cache=True)
def samples_hit_pose(a, x, y, th, off, hl, hw, reach2):
    """Any sample of ``a`` against one fixed pose."""
    for i in range(a.shape[0]):
        dx = a[i, 0] - x
        dy = a[i, 1] - y
        if dx * dx + dy * dy > reach2:
            continue
        if box_box(a[i, 0], a[i, 1], a[i, 2], x, y, th, off, hl, hw):
            return True
    return False


@njit(cache=True)
def count_hits(a, others, off, hl, hw, reach2, reach_step2):
    """Number of rows of ``others`` (m, k, 3) colliding index-aligned with ``a``."""
    cnt = 0
    for j in range(others.shape[0]):
        dx = a[0, 0] - others[j, 0, 0]
        dy = a[0, 1] - others[j, 0, 1]
        if dx * dx + dy * dy > reach_step2:
            continue
        if samples_collide(a, others[j], off, hl, hw, reach2):
            cnt += 1
    return cnt


@njit(cache=True)
def any_hit(a, others, off, hl, hw, reach2, reach_step2):
    for j in range(others.shape[0]):
        dx = a[0, 0] - others[j, 0, 0]
        dy = a[0, 1] - others[j, 0, 1]
        if dx * dx + dy * dy > reach_step2:
            continue
        if samples_collide(a, others[j], off, hl, hw, reach2):
            return True
    return False


@njit(cache=True)
def expand_moving(x, y, th, dist, radius, n_interior, off, hl, hw, obs, width, height):
    """Successors and validity of the six moving primitives, in FL FS FR BL BS BR order."""
    k = n_interior + 2
    samples = np.empty((6, k, 3))
    valid = np.zeros(6, dtype=np.bool_)
    idx = 0
    for direction in (1, -1):
        for steer in (1, 0, -1):
            smp = primitive_samples(x, y, th, direction, steer, dist, radius, n_interior)
            samples[idx] = smp
            valid[idx] = samples_static_free(smp, off, hl, hw, obs, width, height)
            idx += 1
    return samples, valid


@njit(cache=True)
def collide_index(a, b, off, hl, hw, reach2):
    """First sample index at which two index-aligned sweeps collide, or -1."""
    n = min(a.shape[0], b.shape[0])
    for i in range(n):
        dx = a[i, 0] - b[i, 0]
        dy = a[i, 1] - b[i, 1]
        if dx * dx + dy * dy > reach2:
            continue
        if box_box(a[i, 0], a[i, 1], a[i, 2], b[i, 0], b[i, 1], b[i, 2], off, hl, hw):
            return i
    return -1


@njit(cache=True)
def scan_conflicts(P, horizon, off, hl, hw, reach2, reach_step2):
    """Scan padded sweeps P (n, T, k, 3) for pairwise collisions at t < horizon.

    Returns (t, i, j, sub, count) of the first conflict in (t, i, j) order and
    the total number of colliding (t, i, j) triples; t = -1 when none.
    """
    n = P.shape[0]
    T = P.shape[1]
    first_t = -1
    fi = -1
    fj = -1
    fs = -1
    count = 0
    for t in range(min(T, horizon)):
        for i in range(n):
            for j in range(i + 1, n):
                dx = P[i, t, 0, 0] - P[j, t, 0, 0]
                dy = P[i, t, 0, 1] - P[j, t, 0, 1]
                if dx * dx + dy * dy > reach_step2:
                    continue
                idx = collide_index(P[i, t], P[j, t], off, hl, hw, reach2)
                if idx >= 0:
                    count += 1
                    if first_t < 0:
                        first_t = t
                        fi = i
                        fj = j
                        fs = idx
    return first_t, fi, fj, fs, count
