"""Least-restrictive hyperplane control barrier functions for 2D double integrators.

Each obstacle gets a separating hyperplane with normal angle theta; the
filter picks theta per obstacle together with the control that stays
closest to the desired one.  See :func:`hcbf.filter.optimize`.
"""
from .barrier import (AffineConstraint, AgentState, AlphaFunction, Limits, ObstacleState,
                      braking_distance, cbf_constraint, h_dot, h_value, orthogonal_theta)
from .filter import (FilterConfig, FilterResult, Mode, Status, ThetaAssignment, apply_filter,
                     brute_force_oracle, optimize, solve_fixed_theta, solve_qp)
from .geometry import (Disc, Ellipse, GeneralRadial, GeometryError, InsideHullError, Polygon,
                       SupportModel, closest_point, convex_hull, exact_support, fit_fourier,
                       signed_distance, support_distance)
from .kernels import BACKEND
from .sim import ObstacleSpec, Scenario, ScenarioError, TrajectoryLog, metrics, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AffineConstraint", "AgentState", "AlphaFunction", "Limits", "ObstacleState",
    "braking_distance", "cbf_constraint", "h_dot", "h_value", "orthogonal_theta",
    "FilterConfig", "FilterResult", "Mode", "Status", "ThetaAssignment", "apply_filter",
    "brute_force_oracle", "optimize", "solve_fixed_theta", "solve_qp",
    "Disc", "Ellipse", "GeneralRadial", "GeometryError", "InsideHullError", "Polygon",
    "SupportModel", "closest_point", "convex_hull", "exact_support", "fit_fourier",
    "signed_distance", "support_distance", "BACKEND",
    "ObstacleSpec", "Scenario", "ScenarioError", "TrajectoryLog", "metrics", "run_scenario",
]
