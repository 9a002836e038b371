# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled forbidden-offset kernels; same algorithm and layout as ``_fallback``."""

from libc.math cimport sqrt, fabs, INFINITY

BACKEND = "compiled"

cdef double _EPS = 1e-12
cdef double BISECT_TOL = 1e-9


cdef int _analytic(double[::1] mv, double[:, ::1] rows, Py_ssize_t i, double sep,
                   double* out) noexcept nogil:
    cdef double nx = mv[0], ny = mv[1], mvx = mv[2], mvy = mv[3], t0 = mv[4]
    cdef double lx = mv[5], ly = mv[6]
    cdef double px = rows[i, 0], py = rows[i, 1], ivx = rows[i, 2], ivy = rows[i, 3]
    cdef double tref = rows[i, 4]
    cdef double ts = t0 if t0 > tref else tref
    cdef double ax = (nx + mvx * (ts - t0)) - (px + ivx * (ts - tref))
    cdef double ay = (ny + mvy * (ts - t0)) - (py + ivy * (ts - tref))
    cdef double s2 = sep * sep
    cdef int n = 0
    cdef double al = ax * lx + ay * ly
    cdef double disc = al * al - (ax * ax + ay * ay - s2)
    cdef double r, dvx, dvy, vv, g, wx, wy, c, k, b, m, lo, hi, xb, tmp
    if disc > 0.0:
        r = sqrt(disc)
        out[0] = -al - r
        out[1] = -al + r
        n = 1
    dvx = mvx - ivx
    dvy = mvy - ivy
    vv = dvx * dvx + dvy * dvy
    if vv > 0.0:
        g = sqrt(vv)
        wx = dvx / g
        wy = dvy / g
        c = -ax * wy + ay * wx
        k = -lx * wy + ly * wx
        b = ax * wx + ay * wy
        m = lx * wx + ly * wy
        if fabs(k) > _EPS:
            lo = (-sep - c) / k
            hi = (sep - c) / k
            if lo > hi:
                tmp = lo
                lo = hi
                hi = tmp
        elif fabs(c) < sep:
            lo = -INFINITY
            hi = INFINITY
        else:
            lo = 0.0
            hi = 0.0
        if fabs(m) > _EPS:
            xb = -b / m
            if m > 0.0:
                if xb < hi:
                    hi = xb
            elif xb > lo:
                lo = xb
        elif b >= 0.0:
            hi = lo
        if lo < hi:
            if n == 1 and lo < out[1] and out[0] < hi:
                if lo < out[0]:
                    out[0] = lo
                if hi > out[1]:
                    out[1] = hi
            else:
                out[2 * n] = lo
                out[2 * n + 1] = hi
                n += 1
    return n


cdef bint _conflict_windowed(double[::1] mv, double[:, ::1] rows, Py_ssize_t i, double x,
                             double sep, double cx, double cy, double radius) noexcept nogil:
    cdef double nx = mv[0], ny = mv[1], mvx = mv[2], mvy = mv[3], t0 = mv[4]
    cdef double lx = mv[5], ly = mv[6]
    cdef double px = rows[i, 0], py = rows[i, 1], ivx = rows[i, 2], ivy = rows[i, 3]
    cdef double tref = rows[i, 4], wlo = rows[i, 5], whi = rows[i, 6]
    cdef double mx = nx + lx * x
    cdef double my = ny + ly * x
    cdef double qx = mx - cx, qy = my - cy
    cdef double a = mvx * mvx + mvy * mvy
    cdef double b = qx * mvx + qy * mvy
    cdef double c = qx * qx + qy * qy - radius * radius
    cdef double disc = b * b - a * c
    cdef double r, lo, hi, dx, dy, dvx, dvy, vv, tau
    if disc < 0.0:
        return False
    r = sqrt(disc)
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
    dvx = mvx - ivx
    dvy = mvy - ivy
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


cdef double _bisect(double[::1] mv, double[:, ::1] rows, Py_ssize_t i, double free,
                    double conf, double sep, double cx, double cy,
                    double radius) noexcept nogil:
    cdef double mid
    while fabs(conf - free) > BISECT_TOL:
        mid = 0.5 * (free + conf)
        if mid == free or mid == conf:
            break
        if _conflict_windowed(mv, rows, i, mid, sep, cx, cy, radius):
            conf = mid
        else:
            free = mid
    return free


def forbidden_raw(mover, rows, double sep, double cx, double cy, double radius,
                  bint windowed, int nsamples):
    """Forbidden offset intervals per intruder as ``(lo, hi, row_index)`` triples."""
    cdef double[::1] mv = _as_mover(mover)
    cdef double[:, ::1] rw = _as_rows(rows)
    cdef double buf[4]
    cdef double xc, xmin = 0.0, xmax = 0.0, lo, hi, step, x, prev_free, run_start, last_conf
    cdef Py_ssize_t i, j
    cdef int n, p
    cdef bint in_run
    out = []
    if windowed:
        xc = (cx - mv[0]) * mv[5] + (cy - mv[1]) * mv[6]
        xmin = xc - radius
        xmax = xc + radius
    for i in range(rw.shape[0]):
        n = _analytic(mv, rw, i, sep, buf)
        for p in range(n):
            lo = buf[2 * p]
            hi = buf[2 * p + 1]
            if not windowed:
                out.append((lo, hi, i))
                continue
            if lo < xmin:
                lo = xmin
            if hi > xmax:
                hi = xmax
            if lo >= hi:
                continue
            step = (hi - lo) / nsamples
            prev_free = lo
            in_run = False
            run_start = 0.0
            last_conf = 0.0
            for j in range(nsamples):
                x = lo + step * (j + 0.5)
                if _conflict_windowed(mv, rw, i, x, sep, cx, cy, radius):
                    if not in_run:
                        run_start = _bisect(mv, rw, i, prev_free, x, sep, cx, cy, radius)
                        in_run = True
                    last_conf = x
                else:
                    if in_run:
                        out.append((run_start,
                                    _bisect(mv, rw, i, x, last_conf, sep, cx, cy, radius), i))
                        in_run = False
                    prev_free = x
            if in_run:
                out.append((run_start, _bisect(mv, rw, i, hi, last_conf, sep, cx, cy, radius), i))
    return out


def conflicting_rows(mover, rows, double x, double sep, double cx, double cy, double radius,
                     bint windowed):
    """Indices of intruder rows in conflict with the mover shifted by ``x``."""
    cdef double[::1] mv = _as_mover(mover)
    cdef double[:, ::1] rw = _as_rows(rows)
    cdef double buf[4]
    cdef Py_ssize_t i
    cdef int n, p
    cdef bint hit
    out = []
    for i in range(rw.shape[0]):
        if windowed:
            hit = _conflict_windowed(mv, rw, i, x, sep, cx, cy, radius)
        else:
            hit = False
            n = _analytic(mv, rw, i, sep, buf)
            for p in range(n):
                if buf[2 * p] < x < buf[2 * p + 1]:
                    hit = True
        if hit:
            out.append(i)
    return out


cdef double[::1] _as_mover(mover):
    cdef double[::1] mv = _cython_array_1d(7)
    cdef int j
    for j in range(7):
        mv[j] = mover[j]
    return mv


cdef double[:, ::1] _as_rows(rows):
    cdef Py_ssize_t n = len(rows), i
    cdef int j
    cdef double[:, ::1] rw
    if n == 0:
        return _cython_array_2d(1, 7)[:0]
    rw = _cython_array_2d(n, 7)
    for i in range(n):
        row = rows[i]
        for j in range(7):
            rw[i, j] = row[j]
    return rw


from cython.view cimport array as cvarray


cdef double[::1] _cython_array_1d(Py_ssize_t n):
    return cvarray(shape=(n,), itemsize=sizeof(double), format="d")


cdef double[:, ::1] _cython_array_2d(Py_ssize_t n, Py_ssize_t m):
    return cvarray(shape=(n, m), itemsize=sizeof(double), format="d")
