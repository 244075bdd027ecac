"""Pure-Python hot kernels (fallback for the compiled ``_kernels`` module).

Both modules expose the same three functions and must agree to rounding.

``solve_qp`` minimizes ``(u - ud)^T Q (u - ud)`` over the disc ``|u| <= umax``
intersected with half-planes ``a0*u0 + a1*u1 + c >= 0``.  The feasible set is
convex and the objective strictly convex, so the minimizer is the feasible
point of least objective among: ``ud`` itself, the Q-projection onto each
line, each pairwise line intersection, each line/circle intersection and the
Q-nearest point of the circle.
"""
import math

INF = math.inf
FEAS_TOL = 1e-10
ZERO_ROW = 1e-14


def _circle_point(q00, q01, q11, ud0, ud1, umax):
    # u(mu) = (Q + mu I)^-1 Q ud; find mu >= 0 with |u(mu)| = umax.
    w0 = q00 * ud0 + q01 * ud1
    w1 = q01 * ud0 + q11 * ud1
    lo, hi = 0.0, math.hypot(w0, w1) / umax
    mu = 0.0
    u0, u1 = ud0, ud1
    for _ in range(200):
        a00 = q00 + mu
        a11 = q11 + mu
        det = a00 * a11 - q01 * q01
        u0 = (a11 * w0 - q01 * w1) / det
        u1 = (a00 * w1 - q01 * w0) / det
        nrm = math.hypot(u0, u1)
        err = nrm - umax
        if abs(err) <= 1e-15 * umax or hi - lo <= 1e-16 * (1.0 + hi):
            break
        if err > 0:
            lo = mu
        else:
            hi = mu
        z0 = (a11 * u0 - q01 * u1) / det
        z1 = (a00 * u1 - q01 * u0) / det
        dphi = -(u0 * z0 + u1 * z1) / (nrm * nrm * nrm)
        step = mu - (1.0 / umax - 1.0 / nrm) / dphi
        mu = step if lo < step < hi else 0.5 * (lo + hi)
    nrm = math.hypot(u0, u1)
    return u0 * umax / nrm, u1 * umax / nrm


def solve_qp(q00, q01, q11, ud0, ud1, umax, rows):
    """Return ``(ok, u0, u1, objective)``; ``ok`` is False when infeasible."""
    lines = []
    for r in rows:
        a0, a1, c = float(r[0]), float(r[1]), float(r[2])
        if abs(a0) + abs(a1) <= ZERO_ROW:
            if c < -FEAS_TOL:
                return False, 0.0, 0.0, INF
            continue
        lines.append((a0, a1, c))

    r2 = umax * umax * (1.0 + 1e-12)

    def feasible(u0, u1):
        if u0 * u0 + u1 * u1 > r2:
            return False
        for a0, a1, c in lines:
            if a0 * u0 + a1 * u1 + c < -FEAS_TOL:
                return False
        return True

    if feasible(ud0, ud1):
        return True, ud0, ud1, 0.0

    best = [INF, 0.0, 0.0]

    def consider(u0, u1):
        if feasible(u0, u1):
            d0 = u0 - ud0
            d1 = u1 - ud1
            f = q00 * d0 * d0 + 2.0 * q01 * d0 * d1 + q11 * d1 * d1
            if f < best[0]:
                best[0], best[1], best[2] = f, u0, u1

    det = q00 * q11 - q01 * q01
    i00, i01, i11 = q11 / det, -q01 / det, q00 / det
    m = len(lines)
    for i in range(m):
        a0, a1, c = lines[i]
        g0 = i00 * a0 + i01 * a1
        g1 = i01 * a0 + i11 * a1
        lam = (a0 * ud0 + a1 * ud1 + c) / (a0 * g0 + a1 * g1)
        consider(ud0 - lam * g0, ud1 - lam * g1)

        aa = a0 * a0 + a1 * a1
        f0 = -c * a0 / aa
        f1 = -c * a1 / aa
        rem = umax * umax - (f0 * f0 + f1 * f1)
        if rem >= -1e-12 * umax * umax:
            # A tangent line touches the disc at one point; keep it despite rounding.
            half = math.sqrt(rem / aa) if rem > 0.0 else 0.0
            consider(f0 - half * a1, f1 + half * a0)
            consider(f0 + half * a1, f1 - half * a0)

        for j in range(i + 1, m):
            b0, b1, d = lines[j]
            den = a0 * b1 - a1 * b0
            if abs(den) <= 1e-14 * math.hypot(a0, a1) * math.hypot(b0, b1):
                continue
            consider((-c * b1 + d * a1) / den, (-a0 * d + b0 * c) / den)

    if ud0 * ud0 + ud1 * ud1 > umax * umax:
        u0, u1 = _circle_point(q00, q01, q11, ud0, ud1, umax)
        consider(u0, u1)

    if best[0] == INF:
        return False, 0.0, 0.0, INF
    return True, best[1], best[2], best[0]


def eval_theta(theta, delta, dpx, dpy, dvx, dvy, umax, kalpha, q00, q01, q11, ud0, ud1, others):
    """Objective of the fixed-theta QP with one obstacle's normal set to ``theta``.

    ``delta`` is the total safety distance at ``theta``; ``(dpx, dpy)`` and
    ``(dvx, dvy)`` are agent-minus-obstacle position and velocity.  Returns
    ``(objective, u0, u1, h)`` with an infinite objective when ``h < 0`` or
    the QP is infeasible.
    """
    n0 = math.cos(theta)
    n1 = math.sin(theta)
    s = n0 * dvx + n1 * dvy
    h = n0 * dpx + n1 * dpy - delta
    if s < 0.0:
        h -= s * s / (2.0 * umax)
    if h < 0.0:
        return INF, 0.0, 0.0, h
    rows = list(others)
    if s < 0.0:
        rows.append((-n0 * s / umax, -n1 * s / umax, s + kalpha * h))
    ok, u0, u1, f = solve_qp(q00, q01, q11, ud0, ud1, umax, rows)
    return f, u0, u1, h


def scan_theta(thetas, deltas, dpx, dpy, dvx, dvy, umax, kalpha, q00, q01, q11, ud0, ud1,
               others, out_obj, out_u, out_h):
    """Vector form of :func:`eval_theta`, writing into the output arrays."""
    rows = [tuple(r) for r in others]
    for k in range(len(thetas)):
        f, u0, u1, h = eval_theta(thetas[k], deltas[k], dpx, dpy, dvx, dvy, umax, kalpha,
                                  q00, q01, q11, ud0, ud1, rows)
        out_obj[k] = f
        out_u[k, 0] = u0
        out_u[k, 1] = u1
        out_h[k] = h
