"""Double-integrator simulation under a CBF safety filter."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .barrier import AgentState, Limits, ObstacleState, cbf_constraint, h_value
from .filter import (FilterConfig, Mode, Status, ThetaAssignment, apply_filter, optimize,
                     solve_fixed_theta)
from .geometry import SupportModel, exact_support, fit_fourier, signed_distance

_trapz = getattr(np, "trapezoid", None) or np.trapz

CLEARANCE_TOL = 1e-6
INTERVENTION_EPS = 1e-6


class ScenarioError(ValueError):
    """Scenario fails validation."""


@dataclass(frozen=True, eq=False)
class ObstacleSpec:
    """Initial obstacle state plus how its support distance is modelled."""

    state: ObstacleState
    support: str = "exact"
    n_terms: int = 16

    def __post_init__(self):
        if self.support not in ("exact", "fourier"):
            raise ScenarioError(f"unknown support model {self.support!r}")
        if self.n_terms < 0:
            raise ScenarioError("n_terms must be non-negative")

    def build_support(self, agent_radius: float) -> SupportModel:
        if self.support == "fourier":
            return fit_fourier(self.state.shape, self.n_terms, agent_radius=agent_radius)
        return exact_support(self.state.shape, agent_radius)


@dataclass(frozen=True, eq=False)
class Scenario:
    agent: AgentState
    goal: np.ndarray
    agent_radius: float = 0.5
    kp: float = 1.0
    kd: float = 2.0
    limits: Limits = Limits(1.0)
    dt: float = 0.01
    duration: float = 10.0
    theta_update_every: int = 1
    margin: Optional[float] = None
    obstacles: tuple = ()
    filter: FilterConfig = field(default_factory=FilterConfig)
    name: str = "scenario"
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "goal", np.asarray(self.goal, dtype=float))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def with_mode(self, mode: Mode) -> "Scenario":
        return dataclasses.replace(self, filter=dataclasses.replace(self.filter, mode=mode))

    @property
    def safety_margin(self) -> float:
        """Extra distance the filter keeps to absorb zero-order-hold error.

        Defaults to ``u_max * dt**2``, a few times the per-step drift of h
        seen when the agent rides the barrier boundary.
        """
        if self.margin is not None:
            return float(self.margin)
        return self.limits.u_max * self.dt * self.dt

    def supports(self) -> list:
        r = self.agent_radius + self.safety_margin
        return [spec.build_support(r) for spec in self.obstacles]

    def validate(self, supports=None) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ScenarioError("sim.dt must be positive")
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ScenarioError("sim.duration must be positive")
        if abs(self.n_steps * self.dt - self.duration) > 1e-9 * max(1.0, self.duration):
            raise ScenarioError("sim.duration must be a whole number of steps")
        if self.theta_update_every < 1:
            raise ScenarioError("sim.theta_update_every must be at least 1")
        if not self.safety_margin >= 0:
            raise ScenarioError("sim.margin must be non-negative")
        if not self.agent_radius >= 0:
            raise ScenarioError("agent.radius must be non-negative")
        if self.goal.shape != (2,) or not np.all(np.isfinite(self.goal)):
            raise ScenarioError("goal must be a finite 2-vector")
        if self.filter.mode is Mode.FIXED_THETA and len(self.filter.fixed_theta) != len(self.obstacles):
            raise ScenarioError("filter.fixed_theta needs one angle per obstacle")
        supports = supports if supports is not None else self.supports()
        thetas = np.linspace(0.0, 2 * math.pi, 3600, endpoint=False)
        for k, (spec, sup) in enumerate(zip(self.obstacles, supports)):
            if not any(h_value(t, self.agent, spec.state, sup, self.limits) >= 0 for t in thetas):
                raise ScenarioError(f"obstacles[{k}]: agent starts with h < 0 for every theta")


@dataclass(eq=False)
class TrajectoryLog:
    """Per-step record; per-obstacle columns have shape (steps, K)."""

    t: np.ndarray
    p: np.ndarray
    v: np.ndarray
    u_des: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    h: np.ndarray
    cons: np.ndarray
    clear: np.ndarray
    status: list
    outcome: str = "success"
    events: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def n_obstacles(self) -> int:
        return self.theta.shape[1]

    @property
    def intervention(self) -> np.ndarray:
        return np.linalg.norm(self.u - self.u_des, axis=1)


def pd_control(agent: AgentState, goal, kp: float, kd: float) -> np.ndarray:
    return kp * (np.asarray(goal, dtype=float) - agent.p) - kd * agent.v


def step_exact(agent: AgentState, u, dt: float) -> AgentState:
    """Zero-order-hold step of the double integrator."""
    u = np.asarray(u, dtype=float)
    return AgentState(agent.p + agent.v * dt + 0.5 * u * dt * dt, agent.v + u * dt)


def braking_control(agent: AgentState, u_max: float) -> np.ndarray:
    speed = float(np.linalg.norm(agent.v))
    if speed == 0.0:
        return np.zeros(2)
    return -u_max * agent.v / speed


def _filter_step(scenario, k, agent, obstacles, supports, u_des, warm):
    cfg, lim = scenario.filter, scenario.limits
    if cfg.mode is not Mode.LEAST_RESTRICTIVE:
        return apply_filter(agent, obstacles, supports, u_des, cfg, lim)
    if warm is not None and k % scenario.theta_update_every != 0:
        # Between re-optimizations only the fixed-angle QP is solved.
        res = solve_fixed_theta(agent, obstacles, supports, warm, u_des, cfg, lim)
        if res.status is Status.OPTIMAL:
            return res
    return optimize(agent, obstacles, supports, u_des, cfg, lim, warm)


def run_scenario(scenario: Scenario, supports: Optional[list] = None) -> TrajectoryLog:
    supports = supports if supports is not None else scenario.supports()
    scenario.validate(supports)
    K = len(scenario.obstacles)
    n = scenario.n_steps
    dt = scenario.dt
    lim = scenario.limits
    alpha = scenario.filter.alpha

    agent = scenario.agent
    obstacles = [spec.state for spec in scenario.obstacles]
    warm: Optional[ThetaAssignment] = None

    cols = {name: [] for name in ("t", "p", "v", "u_des", "u", "theta", "h", "cons", "clear")}
    status, events = [], []
    outcome = "success"

    for k in range(n + 1):
        t = k * dt
        u_des = pd_control(agent, scenario.goal, scenario.kp, scenario.kd)
        res = _filter_step(scenario, k, agent, obstacles, supports, u_des, warm)
        if res.status is Status.INFEASIBLE:
            u = braking_control(agent, lim.u_max)
            events.append(f"t={t:.6g}: filter infeasible, braking")
            outcome = "infeasible"
        else:
            u = res.u
            warm = res.thetas

        thetas = res.thetas.thetas
        hs, cons, clear = [], [], []
        for j in range(K):
            th = thetas[j]
            if math.isfinite(th):
                hs.append(h_value(th, agent, obstacles[j], supports[j], lim))
                cons.append(cbf_constraint(th, agent, obstacles[j], supports[j], alpha, lim).value(u))
            else:
                hs.append(math.nan)
                cons.append(math.nan)
            d = signed_distance(obstacles[j].shape, obstacles[j].position, agent.p)
            clear.append(d - scenario.agent_radius)

        cols["t"].append(t)
        cols["p"].append(agent.p)
        cols["v"].append(agent.v)
        cols["u_des"].append(u_des)
        cols["u"].append(u)
        cols["theta"].append(thetas)
        cols["h"].append(hs)
        cols["cons"].append(cons)
        cols["clear"].append(clear)
        status.append(res.status.value)

        if K and min(clear) < -CLEARANCE_TOL:
            events.append(f"t={t:.6g}: collision (clearance {min(clear):.3g})")
            outcome = "collision"
        if outcome != "success":
            break
        if k < n:
            agent = step_exact(agent, u, dt)
            obstacles = [o.advanced(dt) for o in obstacles]

    def arr(name, width):
        return np.array(cols[name], dtype=float).reshape(len(cols["t"]), width)

    return TrajectoryLog(
        t=np.array(cols["t"]), p=arr("p", 2), v=arr("v", 2), u_des=arr("u_des", 2), u=arr("u", 2),
        theta=arr("theta", K), h=arr("h", K), cons=arr("cons", K), clear=arr("clear", K),
        status=status, outcome=outcome, events=events,
    )


def goal_distance(log: TrajectoryLog, goal) -> np.ndarray:
    return np.linalg.norm(log.p - np.asarray(goal, dtype=float), axis=1)


def metrics(log: TrajectoryLog, scenario: Scenario) -> dict:
    if len(log) == 0:
        raise ValueError("empty log")
    gap = log.intervention
    active = gap > INTERVENTION_EPS
    dist = goal_distance(log, scenario.goal)
    near = np.flatnonzero(dist <= 1.0)
    if len(log) > 1:
        integral = float(_trapz(gap, log.t))
        active_time = float(_trapz(active.astype(float), log.t))
    else:
        integral = active_time = 0.0
    interval = None
    if active.any():
        idx = np.flatnonzero(active)
        interval = [float(log.t[idx[0]]), float(log.t[idx[-1]])]
    return {
        "scenario": scenario.name,
        "mode": scenario.filter.mode.value,
        "outcome": log.outcome,
        "steps": len(log),
        "duration": float(log.t[-1]),
        "min_clearance": [float(np.nanmin(c)) for c in log.clear.T],
        "min_h": [float(np.nanmin(c)) if np.isfinite(c).any() else None for c in log.h.T],
        "time_to_goal_1m": float(log.t[near[0]]) if len(near) else None,
        "final_goal_distance": float(dist[-1]),
        "intervention_integral": integral,
        "intervention_time": active_time,
        "intervention_interval": interval,
        "max_intervention": float(gap.max()),
        "events": list(log.events),
    }
