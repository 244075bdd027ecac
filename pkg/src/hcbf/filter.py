"""Safety filters: the fixed-theta CBF-QP and the joint (u, theta) search.

The joint problem picks one hyperplane angle per obstacle.  For fixed angles
it is a small QP in the plane, solved exactly by candidate enumeration in
:mod:`hcbf.kernels`.  The angles are searched by coordinate descent over a
uniform grid followed by golden-section refinement, starting from the better
of the warm-start and orthogonal assignments, so the result is never worse
than either.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .barrier import (AgentState, AlphaFunction, InsideHullError, Limits, ObstacleState,
                      cbf_constraint, h_value, orthogonal_theta)
from .geometry import TWO_PI, SupportModel, golden_section


# Discrete-time slack on h: stepping at dt can push h slightly below zero
# where the continuous flow would keep it non-negative.
H_SLACK = 1e-3


class Mode(enum.Enum):
    ORTHOGONAL = "orthogonal"
    LEAST_RESTRICTIVE = "least-restrictive"
    FIXED_THETA = "fixed-theta"


class Status(enum.Enum):
    OPTIMAL = "optimal"
    FALLBACK = "fallback-previous-theta"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class FilterConfig:
    q: np.ndarray = field(default_factory=lambda: np.eye(2))
    alpha_gain: float = 1.0
    theta_grid: int = 360
    refine_tol: float = 1e-6
    max_sweeps: int = 5
    mode: Mode = Mode.LEAST_RESTRICTIVE
    fixed_theta: Optional[tuple] = None

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.shape != (2, 2) or not np.all(np.isfinite(q)):
            raise ValueError("q must be a finite 2x2 matrix")
        if abs(q[0, 1] - q[1, 0]) > 1e-12 * max(1.0, np.abs(q).max()):
            raise ValueError("q must be symmetric")
        if q[0, 0] <= 0 or q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0] <= 0:
            raise ValueError("q must be positive definite")
        q[1, 0] = q[0, 1]
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        AlphaFunction(self.alpha_gain)
        if self.theta_grid < 8:
            raise ValueError("theta_grid must be at least 8")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.mode is Mode.FIXED_THETA and self.fixed_theta is None:
            raise ValueError("fixed-theta mode needs fixed_theta values")
        if self.fixed_theta is not None:
            object.__setattr__(self, "fixed_theta", tuple(float(t) for t in self.fixed_theta))

    @property
    def alpha(self) -> AlphaFunction:
        return AlphaFunction(self.alpha_gain)


@dataclass(frozen=True)
class ThetaAssignment:
    thetas: tuple
    feasible: tuple

    def __len__(self):
        return len(self.thetas)

    @property
    def all_feasible(self) -> bool:
        return all(self.feasible)


@dataclass(frozen=True, eq=False)
class FilterResult:
    u: np.ndarray
    thetas: ThetaAssignment
    objective: float
    status: Status


def _angle_gap(a, b):
    d = np.mod(np.asarray(a) - b, TWO_PI)
    return np.minimum(d, TWO_PI - d)


class _Problem:
    """One filter call's data, flattened for the kernels."""

    def __init__(self, agent, obstacles, supports, u_des, config, limits):
        if len(obstacles) != len(supports):
            raise ValueError("need one support model per obstacle")
        self.agent = agent
        self.obstacles = list(obstacles)
        self.supports = list(supports)
        self.config = config
        self.limits = limits
        self.alpha = config.alpha
        q = config.q
        self.qargs = (float(q[0, 0]), float(q[0, 1]), float(q[1, 1]))
        ud = np.asarray(u_des, dtype=float)
        self.ud = (float(ud[0]), float(ud[1]))
        self.clamped = set()
        self.rel = []
        for obs in self.obstacles:
            dp = agent.p - obs.position
            dv = agent.v - obs.velocity
            self.rel.append((float(dp[0]), float(dp[1]), float(dv[0]), float(dv[1])))

    @property
    def K(self) -> int:
        return len(self.obstacles)

    def h(self, k: int, theta: float) -> float:
        return h_value(theta, self.agent, self.obstacles[k], self.supports[k], self.limits)

    def row(self, k: int, theta: float) -> np.ndarray:
        con = cbf_constraint(theta, self.agent, self.obstacles[k], self.supports[k],
                             self.alpha, self.limits)
        row = con.row()
        if k in self.clamped:
            h = self.h(k, theta)
            if h < 0.0:
                row[2] -= self.alpha(h)
        return row

    def evaluate(self, thetas):
        """Objective, control, per-obstacle h and rows of a full assignment."""
        hs = [self.h(k, t) for k, t in enumerate(thetas)]
        rows = [self.row(k, t) for k, t in enumerate(thetas)]
        if any(h < 0.0 and k not in self.clamped for k, h in enumerate(hs)):
            return math.inf, np.zeros(2), hs, rows
        ok, u0, u1, f = kernels.solve_qp(*self.qargs, *self.ud, self.limits.u_max, rows)
        if not ok:
            return math.inf, np.zeros(2), hs, rows
        return f, np.array([u0, u1]), hs, rows

    def eval_one(self, k: int, theta: float, others) -> float:
        f, _, _, _ = kernels.eval_theta(theta, self.supports[k].total(theta), *self.rel[k],
                                        self.limits.u_max, self.alpha.gain, *self.qargs,
                                        *self.ud, others)
        return f

    def scan(self, k: int, thetas, deltas, others):
        n = len(thetas)
        obj = np.empty(n)
        us = np.empty((n, 2))
        hs = np.empty(n)
        kernels.scan_theta(thetas, deltas, *self.rel[k], self.limits.u_max, self.alpha.gain,
                           *self.qargs, *self.ud, others, obj, us, hs)
        return obj, us, hs

    def grid_h(self, k: int, thetas, deltas) -> np.ndarray:
        dpx, dpy, dvx, dvy = self.rel[k]
        c, s = np.cos(thetas), np.sin(thetas)
        closing = c * dvx + s * dvy
        brake = np.where(closing < 0.0, closing * closing / (2.0 * self.limits.u_max), 0.0)
        return c * dpx + s * dpy - deltas - brake

    def result(self, thetas, f, u, hs, status) -> FilterResult:
        assignment = ThetaAssignment(tuple(float(t) for t in thetas),
                                     tuple(bool(h >= 0.0) for h in hs))
        if not math.isfinite(f):
            return FilterResult(np.zeros(2), assignment, math.inf, Status.INFEASIBLE)
        return FilterResult(u, assignment, float(f), status)


def solve_qp(q, u_des, u_max: float, constraints) -> tuple:
    """Exact minimizer of ``(u-u_des)^T q (u-u_des)`` over the u_max disc and
    half-planes given as rows ``(c_u0, c_u1, c_0)`` or :class:`AffineConstraint`.

    Returns ``(u, objective)``, or ``(None, inf)`` when infeasible.
    """
    q = np.asarray(q, dtype=float)
    rows = [c.row() if hasattr(c, "row") else tuple(c) for c in constraints]
    ok, u0, u1, f = kernels.solve_qp(float(q[0, 0]), float(q[0, 1]), float(q[1, 1]),
                                     float(u_des[0]), float(u_des[1]), float(u_max), rows)
    if not ok:
        return None, math.inf
    return np.array([u0, u1]), f


def solve_fixed_theta(agent: AgentState, obstacles: Sequence[ObstacleState],
                      supports: Sequence[SupportModel], thetas, u_des,
                      config: FilterConfig, limits: Limits) -> FilterResult:
    """CBF-QP with every obstacle's hyperplane angle held fixed."""
    prob = _Problem(agent, obstacles, supports, u_des, config, limits)
    thetas = tuple(thetas.thetas if isinstance(thetas, ThetaAssignment) else thetas)
    if len(thetas) != prob.K:
        raise ValueError("need one theta per obstacle")
    f, u, hs, _ = prob.evaluate(thetas)
    return prob.result(thetas, f, u, hs, Status.OPTIMAL)


def orthogonal_assignment(agent: AgentState, obstacles: Sequence[ObstacleState]):
    """Orthogonal angle per obstacle, or None if the agent is inside any hull."""
    try:
        return tuple(orthogonal_theta(agent, obs) for obs in obstacles)
    except InsideHullError:
        return None


def optimize(agent: AgentState, obstacles: Sequence[ObstacleState],
             supports: Sequence[SupportModel], u_des, config: FilterConfig, limits: Limits,
             warm: Optional[ThetaAssignment] = None) -> FilterResult:
    """Jointly choose per-obstacle hyperplane angles and the safe control."""
    prob = _Problem(agent, obstacles, supports, u_des, config, limits)
    K = prob.K
    if K == 0:
        f, u, hs, _ = prob.evaluate(())
        return prob.result((), f, u, hs, Status.OPTIMAL)

    warm_thetas = None
    if warm is not None and len(warm) == K:
        warm_thetas = tuple(warm.thetas)
    ortho = orthogonal_assignment(agent, obstacles)

    # Incumbent: best of warm start and orthogonal, warm winning ties.
    best = None
    for cand in (warm_thetas, ortho):
        if cand is None:
            continue
        f, u, hs, rows = prob.evaluate(cand)
        if best is None or f < best[1]:
            best = [list(cand), f, u, hs, rows]
        if f == 0.0:
            return prob.result(cand, f, u, hs, Status.OPTIMAL)

    grids = [s.grid(config.theta_grid) for s in prob.supports]
    frozen = {}
    fallback = False
    for k, (th, dl) in enumerate(grids):
        h_grid = prob.grid_h(k, th, dl)
        if np.any(h_grid >= 0.0):
            continue
        # The feasible angles may be narrower than a grid cell.
        if warm_thetas is not None and prob.h(k, warm_thetas[k]) >= 0.0:
            frozen[k] = warm_thetas[k]
            fallback = True
            continue
        t, h = _max_h_theta(prob, k, th, h_grid, ortho)
        if h < -H_SLACK:
            thetas = list(warm_thetas or [g[0][np.argmax(prob.grid_h(j, *g))] for j, g in enumerate(grids)])
            thetas[k] = t
            return prob.result(thetas, math.inf, None, [prob.h(j, t) for j, t in enumerate(thetas)],
                               Status.INFEASIBLE)
        if h < 0.0:
            # Discretization pushed every angle slightly negative: hold the
            # best one and ask only that h stops falling.
            prob.clamped.add(k)
            fallback = True
        frozen[k] = t

    if frozen:
        for cand in (warm_thetas, ortho):
            if cand is None:
                continue
            cand = [frozen.get(k, t) for k, t in enumerate(cand)]
            f, u, hs, rows = prob.evaluate(cand)
            if best is None or f < best[1]:
                best = [cand, f, u, hs, rows]

    if best is None or not math.isfinite(best[1]):
        # Start from each obstacle's best angle on its own.
        start = []
        for k, (th, dl) in enumerate(grids):
            if k in frozen:
                start.append(frozen[k])
                continue
            obj, _, hs = prob.scan(k, th, dl, [])
            ref = warm_thetas[k] if warm_thetas is not None else None
            start.append(_pick(th, obj, hs, ref))
        f, u, hs, rows = prob.evaluate(start)
        if best is None or f < best[1]:
            best = [start, f, u, hs, rows]
        if not math.isfinite(best[1]):
            start = _feasible_start(prob, grids, frozen)
            if start is not None:
                f, u, hs, rows = prob.evaluate(start)
                if f < best[1]:
                    best = [start, f, u, hs, rows]

    thetas, f_inc, u_inc, hs_inc, rows_inc = best
    thetas = list(thetas)
    for _ in range(config.max_sweeps):
        if f_inc == 0.0:
            break
        improved = False
        for k in range(K):
            if k in frozen:
                continue
            if math.isfinite(f_inc) and rows_inc[k] @ np.array([u_inc[0], u_inc[1], 1.0]) > 1e-9:
                continue  # inactive: no angle for this obstacle can lower the objective
            others = [rows_inc[j] for j in range(K) if j != k]
            th, dl = grids[k]
            obj, _, hs = prob.scan(k, th, dl, others)
            i = _pick_index(th, obj, thetas[k])
            if i is None:
                continue
            cand_t, cand_f = float(th[i]), float(obj[i])
            if cand_f > 0.0:
                cell = TWO_PI / len(th)
                t_ref, f_ref = golden_section(lambda t: prob.eval_one(k, t, others),
                                              cand_t - cell, cand_t + cell, config.refine_tol)
                if f_ref < cand_f:
                    cand_t, cand_f = float(np.mod(t_ref, TWO_PI)), f_ref
            if cand_f < f_inc * (1.0 - 1e-12):
                trial = list(thetas)
                trial[k] = cand_t
                f, u, hs_t, rows_t = prob.evaluate(trial)
                if f < f_inc:
                    thetas, f_inc, u_inc, hs_inc, rows_inc = trial, f, u, hs_t, rows_t
                    improved = True
        if not improved:
            break

    if not math.isfinite(f_inc):
        rec = _recover(prob, (warm_thetas, ortho))
        if rec is not None:
            return rec
    status = Status.FALLBACK if fallback else Status.OPTIMAL
    return prob.result(thetas, f_inc, u_inc, hs_inc, status)


def _feasible_start(prob, grids, frozen, radii: int = 25, angles: int = 96, rim: int = 2880):
    """Jointly feasible angles found through the control, or None.

    For a fixed u the obstacles decouple: obstacle k admits u iff some angle
    with h >= 0 gives a non-negative constraint row at u.  Candidate controls
    on a polar grid of the u_max disc are screened this way, and the cheapest
    admissible one fixes each obstacle's angle at its best row value.  Tight
    cases leave only a sliver next to the rim (hard braking), so the rim is
    sampled much more densely than the interior.
    """
    umax = prob.limits.u_max
    r = np.linspace(0.0, umax, radii)[:, None]
    a = np.linspace(0.0, TWO_PI, angles, endpoint=False)[None, :]
    b = np.linspace(0.0, TWO_PI, rim, endpoint=False)
    us = np.concatenate([np.zeros((1, 2)),
                         np.stack([(r * np.cos(a))[1:].ravel(), (r * np.sin(a))[1:].ravel()], axis=1),
                         umax * np.column_stack([np.cos(b), np.sin(b)])])
    if frozen:
        # A clamped row may admit only its tangent point on the rim.
        t = np.array(list(frozen.values()))
        us = np.concatenate([us, umax * np.column_stack([np.cos(t), np.sin(t)])])
    ud = np.array(prob.ud)
    d = us - ud
    q = prob.config.q
    cost = q[0, 0] * d[:, 0] ** 2 + 2.0 * q[0, 1] * d[:, 0] * d[:, 1] + q[1, 1] * d[:, 1] ** 2
    ok = np.ones(len(us), dtype=bool)
    choice = []
    u1 = np.column_stack([us, np.ones(len(us))])
    for k, (th, dl) in enumerate(grids):
        if k in frozen:
            vals = u1 @ prob.row(k, frozen[k])
            ok &= vals >= 0.0
            choice.append(None)
            continue
        h = prob.grid_h(k, th, dl)
        dpx, dpy, dvx, dvy = prob.rel[k]
        c, sn = np.cos(th), np.sin(th)
        closing = c * dvx + sn * dvy
        gain = np.where(closing < 0.0, -closing / umax, 0.0)
        rows = np.stack([gain * c, gain * sn, closing + prob.alpha.gain * h], axis=1)
        vals = np.where(h[None, :] >= 0.0, u1 @ rows.T, -np.inf)
        ok &= vals.max(axis=1) >= 0.0
        choice.append(vals)
    if not ok.any():
        return None
    i = int(np.flatnonzero(ok)[np.argmin(cost[ok])])
    return [frozen[k] if vals is None else float(grids[k][0][int(np.argmax(vals[i]))])
            for k, vals in enumerate(choice)]


def _recover(prob, candidates):
    """Retry whole assignments whose h dipped just below zero, clamping those h to zero."""
    for cand in candidates:
        if cand is None:
            continue
        hs = [prob.h(k, t) for k, t in enumerate(cand)]
        if min(hs) < -H_SLACK:
            continue
        saved = prob.clamped
        prob.clamped = saved | {k for k, h in enumerate(hs) if h < 0.0}
        f, u, hs, _ = prob.evaluate(cand)
        if math.isfinite(f):
            return prob.result(cand, f, u, hs, Status.FALLBACK)
        prob.clamped = saved
    return None


def _max_h_theta(prob, k, thetas, h_grid, ortho):
    """Off-grid angle with the largest h for obstacle k, and that h.

    Used when no grid angle has h >= 0: the feasible arc can be narrower
    than a grid cell, and the orthogonal angle is tried first.
    """
    if ortho is not None:
        h = prob.h(k, ortho[k])
        if h >= 0.0:
            return ortho[k], h
    i = int(np.argmax(h_grid))
    cell = TWO_PI / len(thetas)
    t, neg_h = golden_section(lambda x: -prob.h(k, x), thetas[i] - cell, thetas[i] + cell, 1e-12)
    t = float(np.mod(t, TWO_PI))
    return t, prob.h(k, t)


def _pick_index(thetas, obj, ref):
    """Grid index of least objective; near-ties go to the angle closest to ``ref``."""
    best = float(np.min(obj))
    if not math.isfinite(best):
        return None
    ties = np.flatnonzero(obj <= best * (1.0 + 1e-12))
    if ref is None or len(ties) == 1:
        return int(ties[0])
    return int(ties[np.argmin(_angle_gap(thetas[ties], ref))])


def _pick(thetas, obj, hs, ref):
    i = _pick_index(thetas, obj, ref)
    if i is None:
        i = int(np.argmax(hs))
    return float(thetas[i])


def apply_filter(agent, obstacles, supports, u_des, config: FilterConfig, limits: Limits,
                 warm: Optional[ThetaAssignment] = None) -> FilterResult:
    """Dispatch on ``config.mode``."""
    if config.mode is Mode.LEAST_RESTRICTIVE:
        return optimize(agent, obstacles, supports, u_des, config, limits, warm)
    if config.mode is Mode.ORTHOGONAL:
        thetas = orthogonal_assignment(agent, obstacles)
        if thetas is None:
            prob = _Problem(agent, obstacles, supports, u_des, config, limits)
            return FilterResult(np.zeros(2), ThetaAssignment((math.nan,) * prob.K, (False,) * prob.K),
                                math.inf, Status.INFEASIBLE)
        return solve_fixed_theta(agent, obstacles, supports, thetas, u_des, config, limits)
    return solve_fixed_theta(agent, obstacles, supports, config.fixed_theta, u_des, config, limits)


# ---------------------------------------------------------------------------
# Brute-force oracles (tests and the oracle-check command only)


def grid_qp_oracle(q, u_des, u_max: float, rows, n: int = 2001):
    """Best point of an ``n x n`` grid on ``[-u_max, u_max]^2`` inside the disc
    and every half-plane, for a batch of constraint sets.

    ``rows`` has shape ``(B, m, 3)`` (or ``(m, 3)``).  Within one grid row the
    feasible points form a contiguous run and the objective is a convex
    quadratic in the free coordinate, so the row optimum is among the grid
    points bracketing the clipped continuous minimizer; each candidate is then
    checked exactly.  The result equals exhaustive evaluation of all grid
    points.  Returns ``(objective (B,), u (B, 2))`` with ``inf`` where no grid
    point is feasible.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 2:
        rows = rows[None]
    if rows.size == 0:
        rows = np.zeros((max(len(rows), 1), 0, 3))
    B, m, _ = rows.shape
    q = np.asarray(q, dtype=float)
    ud = np.asarray(u_des, dtype=float)
    g = np.linspace(-u_max, u_max, n)
    step = g[1] - g[0]
    y = g[None, :]

    w2 = u_max * u_max - y * y
    ok = np.broadcast_to(w2 >= 0.0, (B, n)).copy()
    w = np.sqrt(np.maximum(w2, 0.0))
    lo = np.broadcast_to(-w, (B, n)).copy()
    hi = np.broadcast_to(w, (B, n)).copy()
    for j in range(m):
        a0 = rows[:, j, 0:1]
        a1 = rows[:, j, 1:2]
        c = rows[:, j, 2:3]
        rest = a1 * y + c
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = -rest / a0
        lo = np.where(a0 > 0, np.maximum(lo, bound), lo)
        hi = np.where(a0 < 0, np.minimum(hi, bound), hi)
        ok &= np.where(a0 == 0, rest >= 0.0, True)

    i_lo = np.ceil((lo + u_max) / step - 1e-7)
    i_hi = np.floor((hi + u_max) / step + 1e-7)
    ok &= i_lo <= i_hi
    # Unconstrained minimizer of the row objective in x.
    x_star = ud[0] - q[0, 1] * (y - ud[1]) / q[0, 0]
    i_star = np.floor((x_star + u_max) / step)

    best_f = np.full((B, n), np.inf)
    best_x = np.zeros((B, n))
    yy = np.broadcast_to(y, (B, n))
    for d in (-1, 0, 1, 2):
        idx = np.clip(i_star + d, i_lo, i_hi)
        idx = np.clip(idx, 0, n - 1)
        x = g[idx.astype(int)]
        feas = ok & (x * x + yy * yy <= u_max * u_max)
        for j in range(m):
            feas &= rows[:, j, 0:1] * x + rows[:, j, 1:2] * yy + rows[:, j, 2:3] >= 0.0
        d0 = x - ud[0]
        d1 = yy - ud[1]
        f = q[0, 0] * d0 * d0 + 2.0 * q[0, 1] * d0 * d1 + q[1, 1] * d1 * d1
        f = np.where(feas, f, np.inf)
        better = f < best_f
        best_f = np.where(better, f, best_f)
        best_x = np.where(better, x, best_x)

    r = np.argmin(best_f, axis=1)
    ar = np.arange(B)
    obj = best_f[ar, r]
    u = np.stack([best_x[ar, r], g[r]], axis=1)
    return obj, u


def _oracle_rows(agent, obs, support, alpha, limits, thetas):
    """Constraint rows and h over an angle grid, vectorized in numpy."""
    dp = agent.p - obs.position
    dv = agent.v - obs.velocity
    c, s = np.cos(thetas), np.sin(thetas)
    closing = c * dv[0] + s * dv[1]
    approaching = closing < 0.0
    brake = np.where(approaching, closing ** 2 / (2.0 * limits.u_max), 0.0)
    h = c * dp[0] + s * dp[1] - support.total(thetas) - brake
    gain = np.where(approaching, -closing / limits.u_max, 0.0)
    rows = np.stack([gain * c, gain * s, closing + alpha.gain * h], axis=-1)
    return rows, h


def brute_force_oracle(agent: AgentState, obstacles: Sequence[ObstacleState],
                       supports: Sequence[SupportModel], u_des, config: FilterConfig,
                       limits: Limits, u_resolution: int = 2001,
                       theta_resolution: int = 3600, chunk: int = 64) -> FilterResult:
    """Best (u, theta) over a u-grid times a per-obstacle angle grid.

    At most two obstacles; cost grows as ``theta_resolution ** K``.
    """
    K = len(obstacles)
    if K > 2:
        raise ValueError("brute-force oracle supports at most 2 obstacles")
    alpha = config.alpha
    thetas = np.linspace(0.0, TWO_PI, theta_resolution, endpoint=False)
    per = [_oracle_rows(agent, o, s, alpha, limits, thetas) for o, s in zip(obstacles, supports)]

    if K == 0:
        combos = np.zeros((1, 0), dtype=int)
    elif K == 1:
        combos = np.flatnonzero(per[0][1] >= 0.0)[:, None]
    else:
        i0 = np.flatnonzero(per[0][1] >= 0.0)
        i1 = np.flatnonzero(per[1][1] >= 0.0)
        combos = np.stack(np.meshgrid(i0, i1, indexing="ij"), axis=-1).reshape(-1, 2)

    best_f, best_u, best_c = math.inf, np.zeros(2), None
    for start in range(0, len(combos), chunk):
        block = combos[start:start + chunk]
        rows = np.stack([per[k][0][block[:, k]] for k in range(K)], axis=1) if K else \
            np.zeros((len(block), 0, 3))
        obj, u = grid_qp_oracle(config.q, u_des, limits.u_max, rows, u_resolution)
        i = int(np.argmin(obj))
        if obj[i] < best_f:
            best_f, best_u, best_c = float(obj[i]), u[i], block[i]

    if best_c is None:
        nan = (math.nan,) * K
        return FilterResult(np.zeros(2), ThetaAssignment(nan, (False,) * K), math.inf,
                            Status.INFEASIBLE)
    sel = tuple(float(thetas[i]) for i in best_c)
    return FilterResult(best_u, ThetaAssignment(sel, (True,) * K), best_f, Status.OPTIMAL)
