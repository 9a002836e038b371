"""Brute-force reference for the resolver.

Scans lateral offsets outward from zero on a fixed grid and, for each offset,
searches the separation over time with nested sampling grids. Nothing here
uses the closed-form closest-approach or circle-crossing solutions, so it can
check the analytic path independently. The loops are JIT-compiled with numba
when it is installed and run as plain Python otherwise.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True)(fn)

    JIT = True
except ImportError:  # pragma: no cover - depends on environment
    def _jit(fn):
        return fn

    JIT = False

#: Offset grid step of the acceptance oracle (nm).
OFFSET_STEP = 1e-3
#: Finest time resolution reached by the nested time grids (min).
TIME_STEP = 1e-3
_SAMPLES = 32
_SCAN_STEP = 0.05


@_jit
def _inside(px, py, cx, cy, r2):
    dx = px - cx
    dy = py - cy
    return dx * dx + dy * dy <= r2


@_jit
def _circle_window(px, py, vx, vy, t_ref, t_from, cx, cy, radius):
    """Times in ``[t_from, ...)`` spent inside the circle, by sampling and bisection."""
    r2 = radius * radius
    speed = math.sqrt(vx * vx + vy * vy)
    x0 = px + vx * (t_from - t_ref)
    y0 = py + vy * (t_from - t_ref)
    horizon = (math.sqrt((x0 - cx) ** 2 + (y0 - cy) ** 2) + radius) / speed + _SCAN_STEP
    n = int(horizon / _SCAN_STEP) + 2
    first = -1
    last = -1
    for k in range(n):
        t = t_from + k * _SCAN_STEP
        if _inside(px + vx * (t - t_ref), py + vy * (t - t_ref), cx, cy, r2):
            if first < 0:
                first = k
            last = k
        elif first >= 0:
            break
    if first < 0:
        return 1.0, 0.0
    if first == 0:
        lo = t_from
    else:
        a = t_from + (first - 1) * _SCAN_STEP
        b = t_from + first * _SCAN_STEP
        for _ in range(60):
            m = 0.5 * (a + b)
            if _inside(px + vx * (m - t_ref), py + vy * (m - t_ref), cx, cy, r2):
                b = m
            else:
                a = m
        lo = b
    a = t_from + last * _SCAN_STEP
    b = a + _SCAN_STEP
    for _ in range(60):
        m = 0.5 * (a + b)
        if _inside(px + vx * (m - t_ref), py + vy * (m - t_ref), cx, cy, r2):
            a = m
        else:
            b = m
    return lo, a


@_jit
def _dist(mx, my, mvx, mvy, t0, ix, iy, ivx, ivy, ti, t):
    dx = (mx + mvx * (t - t0)) - (ix + ivx * (t - ti))
    dy = (my + mvy * (t - t0)) - (iy + ivy * (t - ti))
    return math.sqrt(dx * dx + dy * dy)


@_jit
def _conflict(mx, my, mvx, mvy, t0, ix, iy, ivx, ivy, ti, lo, hi, sep, t_step):
    """True if the separation drops below ``sep`` somewhere in ``[lo, hi]``.

    Distance along straight tracks is convex in time, so the bracket around
    the best sample of one grid contains the minimum and is re-gridded until
    its spacing reaches ``t_step``.
    """
    if lo > hi:
        return False
    while True:
        step = (hi - lo) / (_SAMPLES - 1)
        best = math.inf
        kbest = 0
        for k in range(_SAMPLES):
            d = _dist(mx, my, mvx, mvy, t0, ix, iy, ivx, ivy, ti, lo + k * step)
            if d < sep:
                return True
            if d < best:
                best = d
                kbest = k
        if step <= t_step:
            return False
        a = lo + max(kbest - 1, 0) * step
        b = lo + min(kbest + 1, _SAMPLES - 1) * step
        lo, hi = a, b


@_jit
def _offset_in_conflict(x, mover, intruders, windows, sep, windowed, cx, cy, radius, t_step):
    nx, ny, mvx, mvy, t0, lx, ly = (mover[0], mover[1], mover[2], mover[3], mover[4],
                                    mover[5], mover[6])
    mx = nx + lx * x
    my = ny + ly * x
    m_lo = 0.0
    m_hi = 0.0
    if windowed:
        m_lo, m_hi = _circle_window(mx, my, mvx, mvy, t0, t0, cx, cy, radius)
        if m_lo > m_hi:
            return False
    for j in range(intruders.shape[0]):
        ix, iy, ivx, ivy, ti = (intruders[j, 0], intruders[j, 1], intruders[j, 2],
                                intruders[j, 3], intruders[j, 4])
        lo = max(t0, ti)
        if windowed:
            lo = max(lo, max(m_lo, windows[j, 0]))
            hi = min(m_hi, windows[j, 1])
        else:
            d0 = _dist(mx, my, mvx, mvy, t0, ix, iy, ivx, ivy, ti, lo)
            rel = math.sqrt((mvx - ivx) ** 2 + (mvy - ivy) ** 2)
            if rel == 0.0:
                if d0 < sep:
                    return True
                continue
            # past this the pair is farther apart than at ``lo``
            hi = lo + 2.0 * d0 / rel + t_step
        if _conflict(mx, my, mvx, mvy, t0, ix, iy, ivx, ivy, ti, lo, hi, sep, t_step):
            return True
    return False


@_jit
def _scan(mover, intruders, windows, sep, windowed, cx, cy, radius, max_offset, h, t_step):
    kmax = int(max_offset / h)
    for k in range(kmax + 1):
        x = k * h
        if not _offset_in_conflict(x, mover, intruders, windows, sep, windowed, cx, cy,
                                   radius, t_step):
            return x
        if k > 0 and not _offset_in_conflict(-x, mover, intruders, windows, sep, windowed,
                                             cx, cy, radius, t_step):
            return -x
    return math.nan


def _pack(mover, intruders, area, windowed):
    n, v, lat = mover.nominal_entry, mover.vel, mover.lateral
    mv = np.array([n.x, n.y, v.x, v.y, mover.ref_time, lat.x, lat.y])
    rows = np.zeros((len(intruders), 5))
    windows = np.zeros((len(intruders), 2))
    c = area.center
    for j, s in enumerate(intruders):
        rows[j] = (s.pos0.x, s.pos0.y, s.vel.x, s.vel.y, s.ref_time)
        if windowed:
            windows[j] = _circle_window(s.pos0.x, s.pos0.y, s.vel.x, s.vel.y, s.ref_time,
                                        s.ref_time, c.x, c.y, area.radius)
    return mv, rows, windows


def oracle_offset(mover, intruders, sep, area, horizon="windowed", max_offset=100.0,
                  step=OFFSET_STEP, t_step=TIME_STEP) -> float:
    """First conflict-free grid offset scanning outward from zero (right side first).

    Returns ``nan`` when every grid offset up to ``max_offset`` conflicts.
    """
    windowed = horizon == "windowed"
    mv, rows, windows = _pack(mover, intruders, area, windowed)
    return float(_scan(mv, rows, windows, float(sep), windowed, area.center.x, area.center.y,
                       float(area.radius), float(max_offset), float(step), float(t_step)))


def oracle_conflicts(mover, intruders, x, sep, area, horizon="windowed",
                     t_step=TIME_STEP) -> bool:
    """Whether offset ``x`` conflicts with any intruder, by sampling alone."""
    windowed = horizon == "windowed"
    mv, rows, windows = _pack(mover, intruders, area, windowed)
    return bool(_offset_in_conflict(float(x), mv, rows, windows, float(sep), windowed,
                                    area.center.x, area.center.y, float(area.radius),
                                    float(t_step)))


def cross_check(trace, samples: int, step: float | None = None, seed: int = 0):
    """Compare resolved offsets of up to ``samples`` records against the grid oracle.

    Records are drawn deterministically among those that saw at least one
    intruder. Returns ``(checked, mismatches)`` where each mismatch is
    ``(id, resolved_offset, oracle_offset)``.
    """
    import random

    from .engine import snapshot_for

    if step is None:
        step = OFFSET_STEP if JIT else 1e-2
    candidates = [k for k, r in enumerate(trace.records) if r.intruder_count > 0]
    picked = sorted(random.Random(seed).sample(candidates, min(samples, len(candidates))))
    spec = trace.spec
    mismatches = []
    for k in picked:
        r = trace.records[k]
        mover, intruders = snapshot_for(trace, k)
        x_o = oracle_offset(mover, intruders, spec.sep, spec.area, spec.horizon,
                            spec.max_offset, step)
        if agreement(mover, intruders, r.offset, x_o, spec.sep, spec.area, spec.horizon,
                     step) == "mismatch":
            mismatches.append((r.id, r.offset, x_o))
    return len(picked), mismatches


def agreement(mover, intruders, x, x_o, sep, area, horizon="windowed",
              step=OFFSET_STEP) -> str:
    """Classify a resolved offset ``x`` against the oracle's ``x_o``.

    ``match``: within two grid steps. ``mirror``: equal magnitude on the other
    side (a near-tie). ``subgrid``: ``x`` sits in a free gap narrower than the
    grid, which the oracle's own predicate confirms is free while finding
    nothing free of smaller magnitude. Anything else is a ``mismatch``.
    """
    tol = 2 * step
    if math.isnan(x_o):
        return "mismatch"
    if abs(x - x_o) <= tol:
        return "match"
    if abs(x_o) < abs(x) - tol:
        return "mismatch"
    if oracle_conflicts(mover, intruders, x, sep, area, horizon):
        return "mismatch"
    return "mirror" if abs(abs(x) - abs(x_o)) <= tol else "subgrid"
