"""Pure-Python forbidden-offset kernels.

Flat argument layout shared with the compiled extension:

mover
    ``(nx, ny, vx, vy, t0, lx, ly)``: nominal entry position at time ``t0``,
    velocity, and unit lateral (right-hand) vector.
intruder row
    ``(px, py, vx, vy, tref, win_lo, win_hi)``: position at ``tref``,
    velocity, and the window in which the intruder can be in conflict.
"""

import math

BACKEND = "python"

_INF = math.inf
_EPS = 1e-12
BISECT_TOL = 1e-9


def _analytic(mover, row, sep):
    """Offsets with a conflict over ``[max(t0, tref), inf)``; at most two open intervals."""
    nx, ny, mvx, mvy, t0, lx, ly = mover
    px, py, ivx, ivy, tref = row[0], row[1], row[2], row[3], row[4]
    ts = t0 if t0 > tref else tref
    ax = (nx + mvx * (ts - t0)) - (px + ivx * (ts - tref))
    ay = (ny + mvy * (ts - t0)) - (py + ivy * (ts - tref))
    s2 = sep * sep

    out = []
    al = ax * lx + ay * ly
    disc = al * al - (ax * ax + ay * ay - s2)
    if disc > 0.0:
        r = math.sqrt(disc)
        out.append((-al - r, -al + r))

    dvx, dvy = mvx - ivx, mvy - ivy
    vv = dvx * dvx + dvy * dvy
    if vv > 0.0:
        g = math.sqrt(vv)
        wx, wy = dvx / g, dvy / g
        c = -ax * wy + ay * wx
        k = -lx * wy + ly * wx
        b = ax * wx + ay * wy
        m = lx * wx + ly * wy
        if abs(k) > _EPS:
            lo, hi = (-sep - c) / k, (sep - c) / k
            if lo > hi:
                lo, hi = hi, lo
        elif abs(c) < sep:
            lo, hi = -_INF, _INF
        else:
            lo, hi = 0.0, 0.0
        # CPA lies strictly in the future iff b + m x < 0
        if abs(m) > _EPS:
            xb = -b / m
            if m > 0.0:
                hi = min(hi, xb)
            else:
                lo = max(lo, xb)
        elif b >= 0.0:
            hi = lo
        if lo < hi:
            if out and lo < out[0][1] and out[0][0] < hi:
                out[0] = (min(lo, out[0][0]), max(hi, out[0][1]))
            else:
                out.append((lo, hi))
    return out


def _conflict_windowed(mover, row, x, sep, cx, cy, radius):
    nx, ny, mvx, mvy, t0, lx, ly = mover
    px, py, ivx, ivy, tref, wlo, whi = row
    mx = nx + lx * x
    my = ny + ly * x
    # mover transit through the circle
    qx, qy = mx - cx, my - cy
    a = mvx * mvx + mvy * mvy
    b = qx * mvx + qy * mvy
    c = qx * qx + qy * qy - radius * radius
    disc = b * b - a * c
    if disc < 0.0:
        return False
    r = math.sqrt(disc)
    lo = t0 + (-b - r) / a
    hi = t0 + (-b + r) / a
    if lo < t0:
        lo = t0
    if lo < wlo:
        lo = wlo
    if hi > whi:
        hi = whi
    if lo > hi:
        return False
    dx = (mx + mvx * (lo - t0)) - (px + ivx * (lo - tref))
    dy = (my + mvy * (lo - t0)) - (py + ivy * (lo - tref))
    dvx, dvy = mvx - ivx, mvy - ivy
    vv = dvx * dvx + dvy * dvy
    if vv > 0.0:
        tau = -(dx * dvx + dy * dvy) / vv
        if tau < 0.0:
            tau = 0.0
        elif tau > hi - lo:
            tau = hi - lo
        dx += dvx * tau
        dy += dvy * tau
    return dx * dx + dy * dy < sep * sep


def _bisect(mover, row, free, conf, sep, cx, cy, radius):
    while abs(conf - free) > BISECT_TOL:
        mid = 0.5 * (free + conf)
        if mid == free or mid == conf:
            break
        if _conflict_windowed(mover, row, mid, sep, cx, cy, radius):
            conf = mid
        else:
            free = mid
    return free


def _refine(mover, row, lo, hi, sep, cx, cy, radius, nsamples):
    """Sub-intervals of ``(lo, hi)`` in conflict over the windowed horizon."""
    out = []
    step = (hi - lo) / nsamples
    prev_free = lo
    run_start = None
    last_conf = 0.0
    for j in range(nsamples):
        x = lo + step * (j + 0.5)
        if _conflict_windowed(mover, row, x, sep, cx, cy, radius):
            if run_start is None:
                run_start = _bisect(mover, row, prev_free, x, sep, cx, cy, radius)
            last_conf = x
        else:
            if run_start is not None:
                out.append((run_start, _bisect(mover, row, x, last_conf, sep, cx, cy, radius)))
                run_start = None
            prev_free = x
    if run_start is not None:
        out.append((run_start, _bisect(mover, row, hi, last_conf, sep, cx, cy, radius)))
    return out


def forbidden_raw(mover, rows, sep, cx, cy, radius, windowed, nsamples):
    """Forbidden offset intervals per intruder as ``(lo, hi, row_index)`` triples."""
    out = []
    if windowed:
        # the mover can only be inside the circle for offsets within this range
        xc = (cx - mover[0]) * mover[5] + (cy - mover[1]) * mover[6]
        xmin, xmax = xc - radius, xc + radius
    for i, row in enumerate(rows):
        for lo, hi in _analytic(mover, row, sep):
            if not windowed:
                out.append((lo, hi, i))
                continue
            lo = max(lo, xmin)
            hi = min(hi, xmax)
            if lo >= hi:
                continue
            for a, b in _refine(mover, row, lo, hi, sep, cx, cy, radius, nsamples):
                out.append((a, b, i))
    return out


def conflicting_rows(mover, rows, x, sep, cx, cy, radius, windowed):
    """Indices of intruder rows in conflict with the mover shifted by ``x``."""
    out = []
    for i, row in enumerate(rows):
        if windowed:
            hit = _conflict_windowed(mover, row, x, sep, cx, cy, radius)
        else:
            hit = any(lo < x < hi for lo, hi in _analytic(mover, row, sep))
        if hit:
            out.append(i)
    return out
