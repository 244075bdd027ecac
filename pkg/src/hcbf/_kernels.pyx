# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Same API and arithmetic as ``_kernels_py``."""

from libc.math cimport sqrt, cos, sin, fabs, hypot, INFINITY
from libc.stdlib cimport malloc, free

cdef double FEAS_TOL = 1e-10
cdef double ZERO_ROW = 1e-14


cdef struct QPOut:
    int ok
    double u0
    double u1
    double obj


cdef inline bint _feasible(double u0, double u1, double r2, double* rows, int m) nogil:
    cdef int i
    if u0 * u0 + u1 * u1 > r2:
        return False
    for i in range(m):
        if rows[3 * i] * u0 + rows[3 * i + 1] * u1 + rows[3 * i + 2] < -FEAS_TOL:
            return False
    return True


cdef inline void _consider(QPOut* best, double u0, double u1, double ud0, double ud1,
                           double q00, double q01, double q11, double r2,
                           double* rows, int m) nogil:
    cdef double d0, d1, f
    if _feasible(u0, u1, r2, rows, m):
        d0 = u0 - ud0
        d1 = u1 - ud1
        f = q00 * d0 * d0 + 2.0 * q01 * d0 * d1 + q11 * d1 * d1
        if f < best.obj:
            best.obj = f
            best.u0 = u0
            best.u1 = u1
            best.ok = 1


cdef void _circle_point(double q00, double q01, double q11, double ud0, double ud1,
                        double umax, double* o0, double* o1) nogil:
    cdef double w0 = q00 * ud0 + q01 * ud1
    cdef double w1 = q01 * ud0 + q11 * ud1
    cdef double lo = 0.0
    cdef double hi = hypot(w0, w1) / umax
    cdef double mu = 0.0
    cdef double u0 = ud0, u1 = ud1
    cdef double a00, a11, det, nrm, err, z0, z1, dphi, step
    cdef int it
    for it in range(200):
        a00 = q00 + mu
        a11 = q11 + mu
        det = a00 * a11 - q01 * q01
        u0 = (a11 * w0 - q01 * w1) / det
        u1 = (a00 * w1 - q01 * w0) / det
        nrm = hypot(u0, u1)
        err = nrm - umax
        if fabs(err) <= 1e-15 * umax or hi - lo <= 1e-16 * (1.0 + hi):
            break
        if err > 0:
            lo = mu
        else:
            hi = mu
        z0 = (a11 * u0 - q01 * u1) / det
        z1 = (a00 * u1 - q01 * u0) / det
        dphi = -(u0 * z0 + u1 * z1) / (nrm * nrm * nrm)
        step = mu - (1.0 / umax - 1.0 / nrm) / dphi
        if lo < step < hi:
            mu = step
        else:
            mu = 0.5 * (lo + hi)
    nrm = hypot(u0, u1)
    o0[0] = u0 * umax / nrm
    o1[0] = u1 * umax / nrm


cdef QPOut _solve(double q00, double q01, double q11, double ud0, double ud1, double umax,
                  double* raw, int m_raw, double* lines) nogil:
    """``lines`` is scratch space for at least ``m_raw`` rows."""
    cdef QPOut best
    cdef int i, j, m = 0
    cdef double a0, a1, c, b0, b1, d, g0, g1, lam, aa, f0, f1, rem, half, den
    cdef double det, i00, i01, i11, r2, c0, c1
    best.ok = 0
    best.u0 = 0.0
    best.u1 = 0.0
    best.obj = INFINITY
    for i in range(m_raw):
        a0 = raw[3 * i]
        a1 = raw[3 * i + 1]
        c = raw[3 * i + 2]
        if fabs(a0) + fabs(a1) <= ZERO_ROW:
            if c < -FEAS_TOL:
                return best
            continue
        lines[3 * m] = a0
        lines[3 * m + 1] = a1
        lines[3 * m + 2] = c
        m += 1

    r2 = umax * umax * (1.0 + 1e-12)
    if _feasible(ud0, ud1, r2, lines, m):
        best.ok = 1
        best.u0 = ud0
        best.u1 = ud1
        best.obj = 0.0
        return best

    det = q00 * q11 - q01 * q01
    i00 = q11 / det
    i01 = -q01 / det
    i11 = q00 / det
    for i in range(m):
        a0 = lines[3 * i]
        a1 = lines[3 * i + 1]
        c = lines[3 * i + 2]
        g0 = i00 * a0 + i01 * a1
        g1 = i01 * a0 + i11 * a1
        lam = (a0 * ud0 + a1 * ud1 + c) / (a0 * g0 + a1 * g1)
        _consider(&best, ud0 - lam * g0, ud1 - lam * g1, ud0, ud1, q00, q01, q11, r2, lines, m)

        aa = a0 * a0 + a1 * a1
        f0 = -c * a0 / aa
        f1 = -c * a1 / aa
        rem = umax * umax - (f0 * f0 + f1 * f1)
        if rem >= -1e-12 * umax * umax:
            # A tangent line touches the disc at one point; keep it despite rounding.
            half = sqrt(rem / aa) if rem > 0.0 else 0.0
            _consider(&best, f0 - half * a1, f1 + half * a0, ud0, ud1, q00, q01, q11, r2, lines, m)
            _consider(&best, f0 + half * a1, f1 - half * a0, ud0, ud1, q00, q01, q11, r2, lines, m)

        for j in range(i + 1, m):
            b0 = lines[3 * j]
            b1 = lines[3 * j + 1]
            d = lines[3 * j + 2]
            den = a0 * b1 - a1 * b0
            if fabs(den) <= 1e-14 * hypot(a0, a1) * hypot(b0, b1):
                continue
            _consider(&best, (-c * b1 + d * a1) / den, (-a0 * d + b0 * c) / den,
                      ud0, ud1, q00, q01, q11, r2, lines, m)

    if ud0 * ud0 + ud1 * ud1 > umax * umax:
        _circle_point(q00, q01, q11, ud0, ud1, umax, &c0, &c1)
        _consider(&best, c0, c1, ud0, ud1, q00, q01, q11, r2, lines, m)
    return best


cdef double* _alloc_rows(int m) except NULL:
    cdef double* p = <double*> malloc(sizeof(double) * 3 * (m + 1))
    if p == NULL:
        raise MemoryError()
    return p


def solve_qp(double q00, double q01, double q11, double ud0, double ud1, double umax, rows):
    """Return ``(ok, u0, u1, objective)``; ``ok`` is False when infeasible."""
    cdef int m = len(rows), i
    cdef double* raw = _alloc_rows(m)
    cdef double* lines = _alloc_rows(m)
    cdef QPOut out
    try:
        for i in range(m):
            r = rows[i]
            raw[3 * i] = r[0]
            raw[3 * i + 1] = r[1]
            raw[3 * i + 2] = r[2]
        out = _solve(q00, q01, q11, ud0, ud1, umax, raw, m, lines)
    finally:
        free(raw)
        free(lines)
    if not out.ok:
        return False, 0.0, 0.0, INFINITY
    return True, out.u0, out.u1, out.obj


cdef inline QPOut _eval(double theta, double delta, double dpx, double dpy, double dvx, double dvy,
                        double umax, double kalpha, double q00, double q01, double q11,
                        double ud0, double ud1, double* raw, int m, double* lines,
                        double* h_out) nogil:
    cdef double n0 = cos(theta)
    cdef double n1 = sin(theta)
    cdef double s = n0 * dvx + n1 * dvy
    cdef double h = n0 * dpx + n1 * dpy - delta
    cdef QPOut out
    cdef int mm = m
    if s < 0.0:
        h -= s * s / (2.0 * umax)
    h_out[0] = h
    if h < 0.0:
        out.ok = 0
        out.u0 = 0.0
        out.u1 = 0.0
        out.obj = INFINITY
        return out
    if s < 0.0:
        raw[3 * m] = -n0 * s / umax
        raw[3 * m + 1] = -n1 * s / umax
        raw[3 * m + 2] = s + kalpha * h
        mm = m + 1
    out = _solve(q00, q01, q11, ud0, ud1, umax, raw, mm, lines)
    if not out.ok:
        out.u0 = 0.0
        out.u1 = 0.0
        out.obj = INFINITY
    return out


def eval_theta(double theta, double delta, double dpx, double dpy, double dvx, double dvy,
               double umax, double kalpha, double q00, double q01, double q11,
               double ud0, double ud1, others):
    """Objective of the fixed-theta QP with one obstacle's normal set to ``theta``.

    Returns ``(objective, u0, u1, h)``; the objective is infinite when
    ``h < 0`` or the QP is infeasible.
    """
    cdef int m = len(others), i
    cdef double* raw = _alloc_rows(m)
    cdef double* lines = _alloc_rows(m)
    cdef double h
    cdef QPOut out
    try:
        for i in range(m):
            r = others[i]
            raw[3 * i] = r[0]
            raw[3 * i + 1] = r[1]
            raw[3 * i + 2] = r[2]
        out = _eval(theta, delta, dpx, dpy, dvx, dvy, umax, kalpha, q00, q01, q11,
                    ud0, ud1, raw, m, lines, &h)
    finally:
        free(raw)
        free(lines)
    return out.obj, out.u0, out.u1, h


def scan_theta(const double[::1] thetas, const double[::1] deltas,
               double dpx, double dpy, double dvx, double dvy,
               double umax, double kalpha, double q00, double q01, double q11,
               double ud0, double ud1, others,
               double[::1] out_obj, double[:, ::1] out_u, double[::1] out_h):
    """Vector form of :func:`eval_theta`, writing into the output arrays."""
    cdef int m = len(others), i, k
    cdef Py_ssize_t n = thetas.shape[0]
    cdef double* raw = _alloc_rows(m)
    cdef double* lines = _alloc_rows(m)
    cdef QPOut out
    try:
        for i in range(m):
            r = others[i]
            raw[3 * i] = r[0]
            raw[3 * i + 1] = r[1]
            raw[3 * i + 2] = r[2]
        with nogil:
            for k in range(n):
                out = _eval(thetas[k], deltas[k], dpx, dpy, dvx, dvy, umax, kalpha,
                            q00, q01, q11, ud0, ud1, raw, m, lines, &out_h[k])
                out_obj[k] = out.obj
                out_u[k, 0] = out.u0
                out_u[k, 1] = out.u1
    finally:
        free(raw)
        free(lines)
