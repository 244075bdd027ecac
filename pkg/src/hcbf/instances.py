"""Seeded random filter instances and the optimizer-vs-oracle cross-check.

Instance ``i`` of seed ``s`` is drawn from ``numpy.random.default_rng([s, i])``,
so any single instance can be regenerated without replaying the others.
The agent sits at the origin; the obstacle's reference point is uniform in
an annulus around it whose inner radius clears the obstacle's extent, and
draws are rejected until the orthogonal angle satisfies ``h >= 0``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .barrier import AgentState, Limits, ObstacleState, h_value, orthogonal_theta
from .filter import FilterConfig, brute_force_oracle, optimize
from .geometry import Disc, Ellipse, Polygon, SupportModel, exact_support, fit_fourier

DEFAULT_SEED = 20240611
GAP_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class Instance:
    agent: AgentState
    obstacle: ObstacleState
    support: SupportModel
    u_des: np.ndarray
    config: FilterConfig
    limits: Limits


def _random_shape(rng):
    kind = rng.integers(3)
    if kind == 0:
        return Disc(rng.uniform(0.3, 1.2))
    if kind == 1:
        a = rng.uniform(0.4, 1.4)
        return Ellipse(a, rng.uniform(0.2, 1.0) * a, rng.uniform(0.0, math.pi))
    n = rng.integers(3, 8)
    ang = np.sort(rng.uniform(0.0, 2 * math.pi, n))
    rad = rng.uniform(0.4, 1.2, n)
    return Polygon(np.column_stack([rad * np.cos(ang), rad * np.sin(ang)]))


def random_instance(seed: int, index: int, max_tries: int = 1000) -> Instance:
    rng = np.random.default_rng([seed, index])
    limits = Limits(1.0)
    for _ in range(max_tries):
        shape = _random_shape(rng)
        agent_radius = rng.uniform(0.1, 0.5)
        support = (fit_fourier(shape, 16, agent_radius=agent_radius)
                   if isinstance(shape, Polygon) and rng.random() < 0.3
                   else exact_support(shape, agent_radius))
        extent = float(np.max(support.grid(360)[1]))
        r = rng.uniform(extent + 0.05, extent + 3.0)
        phi = rng.uniform(0.0, 2 * math.pi)
        obstacle = ObstacleState(shape, (r * math.cos(phi), r * math.sin(phi)),
                                 rng.uniform(-0.4, 0.4, 2) * (rng.random() < 0.5))
        agent = AgentState((0.0, 0.0), rng.uniform(-1.2, 1.2, 2))
        if h_value(orthogonal_theta(agent, obstacle), agent, obstacle, support, limits) < 0.0:
            continue
        u_des = rng.uniform(-1.5, 1.5, 2)
        m = rng.normal(size=(2, 2))
        q = m @ m.T + 0.5 * np.eye(2)
        config = FilterConfig(q=q / np.trace(q), alpha_gain=rng.uniform(0.5, 2.0))
        return Instance(agent, obstacle, support, u_des, config, limits)
    raise RuntimeError(f"no feasible instance after {max_tries} draws (seed {seed}, index {index})")


def oracle_check(seed: int = DEFAULT_SEED, count: int = 100, u_resolution: int = 1001,
                 theta_resolution: int = 3600, tol: float = GAP_TOL) -> dict:
    """Compare :func:`optimize` against the brute-force oracle on random instances.

    The gap is ``optimize - oracle``; the oracle's own grid error makes it an
    upper bound on the true optimum, so only a positive gap signals a miss.
    """
    rows = []
    t0 = time.perf_counter()
    for i in range(count):
        inst = random_instance(seed, i)
        args = (inst.agent, [inst.obstacle], [inst.support], inst.u_des, inst.config, inst.limits)
        ours = optimize(*args)
        ref = brute_force_oracle(*args, u_resolution=u_resolution,
                                 theta_resolution=theta_resolution)
        gap = ours.objective - ref.objective
        if not math.isfinite(gap):
            gap = 0.0 if ours.objective == ref.objective else math.inf
        rows.append({"index": i, "objective": ours.objective, "oracle": ref.objective,
                     "gap": gap, "status": ours.status.value})
    gaps = [r["gap"] for r in rows]
    worst = max(gaps, default=0.0)
    return {
        "seed": seed,
        "count": count,
        "u_resolution": u_resolution,
        "theta_resolution": theta_resolution,
        "tolerance": tol,
        "max_gap": worst,
        "min_gap": min(gaps, default=0.0),
        "passed": bool(worst <= tol),
        "seconds": time.perf_counter() - t0,
        "instances": rows,
    }
