import math

import numpy as np
import pytest

from hcbf.barrier import (AgentState, AlphaFunction, InsideHullError, Limits, ObstacleState,
                          braking_distance, cbf_constraint, closing_speed, h_dot, h_value,
                          orthogonal_theta, unit_normal)
from hcbf.geometry import Disc, Ellipse, Polygon, exact_support

SQUARE = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
LIM = Limits(1.0)


def _disc_case(v=(0.0, 0.0)):
    agent = AgentState((5.0, 0.0), v)
    obs = ObstacleState(Disc(0.5), (0.0, 0.0))
    return agent, obs, exact_support(obs.shape, agent_radius=0.5)


@pytest.mark.parametrize("theta,expect", [(0.0, (1, 0)), (math.pi / 2, (0, 1)),
                                          (math.pi / 4, (math.sqrt(0.5), math.sqrt(0.5)))])
def test_unit_normal(theta, expect):
    assert np.allclose(unit_normal(theta), expect, atol=1e-15)


def test_braking_distance_examples():
    obs = ObstacleState(Disc(1.0), (0, 0), (0.3, -0.2))
    assert braking_distance(0.4, AgentState((5, 0), (0.3, -0.2)), obs, LIM) == 0.0
    still = ObstacleState(Disc(1.0), (0, 0))
    assert braking_distance(0.0, AgentState((5, 0), (-1, 0)), still, LIM) == pytest.approx(0.5)
    assert braking_distance(0.0, AgentState((5, 0), (2, 0)), still, LIM) == 0.0
    assert braking_distance(0.0, AgentState((5, 0), (-1, 0)), still, Limits(2.0)) == pytest.approx(0.25)


def test_h_value_examples():
    agent, obs, sup = _disc_case()
    assert h_value(0.0, agent, obs, sup, LIM) == pytest.approx(4.0, abs=1e-12)
    agent, obs, sup = _disc_case((-1.0, 0.0))
    assert h_value(0.0, agent, obs, sup, LIM) == pytest.approx(3.5, abs=1e-12)


def test_h_zero_on_hyperplane():
    obs = ObstacleState(Disc(0.5), (0.0, 0.0), (0.2, 0.1))
    agent = AgentState((1.0, 3.0), (0.2, 0.1))
    sup = exact_support(obs.shape, agent_radius=0.5)
    assert h_value(0.0, agent, obs, sup, LIM) == pytest.approx(0.0, abs=1e-15)


def test_receding_constraint_always_satisfied():
    agent, obs, sup = _disc_case((0.7, 0.2))
    con = cbf_constraint(0.0, agent, obs, sup, AlphaFunction(1.0), LIM)
    assert np.all(con.c_u == 0) and con.c_0 >= 0
    for u in np.random.default_rng(0).uniform(-1, 1, (20, 2)):
        assert con.value(u) >= 0


def test_approaching_constraint_gain():
    agent, obs, sup = _disc_case((-1.0, 0.0))
    con = cbf_constraint(0.0, agent, obs, sup, AlphaFunction(1.0), LIM)
    assert np.allclose(con.c_u, [1.0, 0.0])
    assert con.c_0 == pytest.approx(-1.0 + 3.5)
    assert np.allclose(con.row(), [1.0, 0.0, 2.5])


def test_constraint_matches_hdot_plus_alpha():
    rng = np.random.default_rng(5)
    alpha = AlphaFunction(1.7)
    for _ in range(50):
        agent = AgentState(rng.uniform(3, 6, 2), rng.normal(size=2))
        obs = ObstacleState(Ellipse(1.0, 0.5, 0.3), rng.uniform(-1, 1, 2), rng.normal(size=2) * 0.3)
        sup = exact_support(obs.shape, 0.2)
        th, u = rng.uniform(0, 2 * math.pi), rng.uniform(-1, 1, 2)
        con = cbf_constraint(th, agent, obs, sup, alpha, LIM)
        h = h_value(th, agent, obs, sup, LIM)
        assert con.value(u) == pytest.approx(h_dot(th, agent, obs, u, LIM) + alpha(h), abs=1e-12)


def _flow(agent, obs, u, eps):
    return (AgentState(agent.p + eps * agent.v, agent.v + eps * np.asarray(u)),
            ObstacleState(obs.shape, obs.position + eps * obs.velocity, obs.velocity))


def test_hdot_finite_difference():
    rng = np.random.default_rng(9)
    eps = 1e-6
    checked = 0
    while checked < 200:
        agent = AgentState(rng.uniform(-6, 6, 2), rng.uniform(-1.5, 1.5, 2))
        obs = ObstacleState(Polygon(SQUARE), (0, 0), rng.uniform(-0.5, 0.5, 2))
        sup = exact_support(obs.shape, 0.3)
        th, u = rng.uniform(0, 2 * math.pi), rng.uniform(-1, 1, 2)
        if h_value(th, agent, obs, sup, LIM) < 0 or abs(closing_speed(th, agent, obs)) < 1e-3:
            continue
        a2, o2 = _flow(agent, obs, u, eps)
        fd = (h_value(th, a2, o2, sup, LIM) - h_value(th, agent, obs, sup, LIM)) / eps
        assert fd == pytest.approx(h_dot(th, agent, obs, u, LIM), abs=1e-5)
        checked += 1


def test_h_continuous_across_zero_closing_speed():
    agent, obs, sup = _disc_case((0.0, 1.0))
    vals = [h_value(t, agent, obs, sup, LIM) for t in (-1e-7, 0.0, 1e-7)]
    assert max(vals) - min(vals) < 1e-6


def test_h_decreasing_in_support():
    agent, obs, _ = _disc_case((-0.5, 0.2))
    hs = [h_value(0.3, agent, obs, exact_support(obs.shape, r), LIM) for r in (0.0, 0.5, 1.0)]
    assert hs[0] > hs[1] > hs[2]


def test_orthogonal_maximizes_h_for_disc_without_relative_motion():
    rng = np.random.default_rng(2)
    th = np.linspace(0, 2 * math.pi, 3600, endpoint=False)
    for _ in range(10):
        v = rng.normal(size=2)
        agent = AgentState(rng.uniform(-5, 5, 2) + 6, v)
        obs = ObstacleState(Disc(1.0), (0, 0), v)
        sup = exact_support(obs.shape, 0.4)
        best = max(h_value(t, agent, obs, sup, LIM) for t in th)
        assert h_value(orthogonal_theta(agent, obs), agent, obs, sup, LIM) >= best - 1e-12


@pytest.mark.parametrize("shape,p,expect", [
    (Disc(1.0), (3, 0), 0.0),
    (Disc(1.0), (0, -2), -math.pi / 2),
    (Polygon(SQUARE), (2, 2), math.pi / 4),
])
def test_orthogonal_theta_examples(shape, p, expect):
    assert orthogonal_theta(AgentState(p, (0, 0)), ObstacleState(shape, (0, 0))) == pytest.approx(expect)


def test_orthogonal_theta_inside_raises():
    with pytest.raises(InsideHullError):
        orthogonal_theta(AgentState((0.2, 0), (0, 0)), ObstacleState(Disc(1.0), (0, 0)))


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_limits_and_alpha_validation(bad):
    with pytest.raises(ValueError):
        Limits(bad)
    with pytest.raises(ValueError):
        AlphaFunction(bad)


def test_state_validation():
    with pytest.raises(ValueError):
        AgentState((0, math.nan), (0, 0))
    with pytest.raises(ValueError):
        AgentState((0, 0, 0), (0, 0))
    obs = ObstacleState(Disc(1.0), (1, 2), (0.5, -1))
    assert np.allclose(obs.advanced(2.0).position, [2, 0])
