"""Theta-parameterized hyperplane CBF for a double-integrator agent.

For a unit normal ``n = (cos theta, sin theta)`` the barrier between agent i
and obstacle j is::

    h = n^T (p_i - p_j) - delta_ij(theta) - b_ij(theta)

with braking distance ``b = (n^T v_rel)^2 / (2 u_max)`` while approaching
(``n^T v_rel < 0``) and zero otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import InsideHullError, Shape, SupportModel, closest_point


def _vec2(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite 2-vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AgentState:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _vec2(self.p, "p"))
        object.__setattr__(self, "v", _vec2(self.v, "v"))


@dataclass(frozen=True, eq=False)
class ObstacleState:
    """Obstacle shape with its reference point at ``position``, moving at ``velocity``."""

    shape: Shape
    position: np.ndarray
    velocity: np.ndarray = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "position", _vec2(self.position, "position"))
        object.__setattr__(self, "velocity", _vec2(self.velocity, "velocity"))

    def advanced(self, dt: float) -> "ObstacleState":
        return ObstacleState(self.shape, self.position + self.velocity * dt, self.velocity)

    def outline(self, n: int = 96) -> np.ndarray:
        return self.position + self.shape.outline(n)


@dataclass(frozen=True)
class Limits:
    u_max: float

    def __post_init__(self):
        if not (math.isfinite(self.u_max) and self.u_max > 0):
            raise ValueError("u_max must be positive")


@dataclass(frozen=True)
class AlphaFunction:
    """Linear extended class-K function ``alpha(x) = gain * x``."""

    gain: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gain) and self.gain > 0):
            raise ValueError("alpha gain must be positive")

    def __call__(self, x):
        return self.gain * x


@dataclass(frozen=True, eq=False)
class AffineConstraint:
    """Feasible controls satisfy ``c_u @ u + c_0 >= 0``."""

    c_u: np.ndarray
    c_0: float

    def value(self, u) -> float:
        return float(self.c_u @ np.asarray(u, dtype=float) + self.c_0)

    def row(self) -> np.ndarray:
        return np.array([self.c_u[0], self.c_u[1], self.c_0])


def unit_normal(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def closing_speed(theta: float, agent: AgentState, obs: ObstacleState) -> float:
    """Relative velocity along the normal; negative while approaching."""
    dv = agent.v - obs.velocity
    return math.cos(theta) * dv[0] + math.sin(theta) * dv[1]


def braking_distance(theta: float, agent: AgentState, obs: ObstacleState, limits: Limits) -> float:
    s = closing_speed(theta, agent, obs)
    if s < 0.0:
        return s * s / (2.0 * limits.u_max)
    return 0.0


# Scalar arithmetic below mirrors the compiled kernels operation for operation,
# so grid scans and single evaluations agree bitwise.

def h_value(theta: float, agent: AgentState, obs: ObstacleState,
            support: SupportModel, limits: Limits) -> float:
    dp = agent.p - obs.position
    gap = math.cos(theta) * dp[0] + math.sin(theta) * dp[1]
    return float(gap - support.total(theta) - braking_distance(theta, agent, obs, limits))


def cbf_constraint(theta: float, agent: AgentState, obs: ObstacleState, support: SupportModel,
                   alpha: AlphaFunction, limits: Limits) -> AffineConstraint:
    """Reduce ``hdot + alpha(h) >= 0`` to an affine constraint on u."""
    n0, n1 = math.cos(theta), math.sin(theta)
    s = closing_speed(theta, agent, obs)
    h = h_value(theta, agent, obs, support, limits)
    if s < 0.0:
        c_u = np.array([-n0 * s / limits.u_max, -n1 * s / limits.u_max])
    else:
        c_u = np.zeros(2)
    return AffineConstraint(c_u=c_u, c_0=float(s + alpha(h)))


def h_dot(theta: float, agent: AgentState, obs: ObstacleState, u, limits: Limits) -> float:
    """Time derivative of h under control u with theta held fixed."""
    n0, n1 = math.cos(theta), math.sin(theta)
    s = closing_speed(theta, agent, obs)
    if s < 0.0:
        return s - (n0 * u[0] + n1 * u[1]) * s / limits.u_max
    return s


def orthogonal_theta(agent: AgentState, obs: ObstacleState) -> float:
    """Normal direction from the obstacle's closest hull point to the agent.

    Raises :class:`~hcbf.geometry.InsideHullError` if the agent centre is
    inside the hull.
    """
    q = closest_point(obs.shape, obs.position, agent.p)
    d = agent.p - q
    return math.atan2(d[1], d[0])


__all__ = [
    "AgentState", "ObstacleState", "Limits", "AlphaFunction", "AffineConstraint",
    "InsideHullError", "unit_normal", "closing_speed", "braking_distance", "h_value",
    "cbf_constraint", "h_dot", "orthogonal_theta",
]
