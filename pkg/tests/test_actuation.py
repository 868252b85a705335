import numpy as np
import pytest
from numpy.testing import assert_allclose

from rcmteleop.actuation import ActuationParams, motor_positions, motor_velocities
from rcmteleop.continuum import (
    ContinuumConfig,
    ContinuumParams,
    actuation_jacobian,
    tendon_lengths,
)

from conftest import random_bend


def test_params_validation():
    assert ActuationParams().R_pulley == pytest.approx(0.0054)
    with pytest.raises(ValueError):
        ActuationParams(R_pulley=0.0)
    with pytest.raises(ValueError):
        ActuationParams(R_pulley=-0.01)


def test_zero_rate_zero_motors(params):
    act = ActuationParams()
    cfg = ContinuumConfig(1.1, 0.4)
    assert_allclose(motor_velocities(cfg, np.zeros(2), params, act), np.zeros(4))


def test_velocity_consistency_1000_random(params):
    # R * theta_m_dot == J_lpsi psi_dot, elementwise, machine tight
    act = ActuationParams()
    rng = np.random.default_rng(80)
    worst = 0.0
    for _ in range(1000):
        cfg = ContinuumConfig(*random_bend(rng, params))
        psi_dot = rng.normal(size=2)
        lhs = act.R_pulley * motor_velocities(cfg, psi_dot, params, act)
        rhs = actuation_jacobian(cfg, params) @ psi_dot
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    assert worst < 1e-12


def test_straight_pure_theta_rate(params):
    # at theta0 the delta column vanishes; rates collapse to
    # (r/R) cos(delta_i) theta_dot
    act = ActuationParams()
    cfg = ContinuumConfig(params.theta0, 0.3)
    out = motor_velocities(cfg, [2.0, 0.0], params, act)
    beta = np.pi / 2
    expect = np.array([
        params.r / act.R_pulley * np.cos(0.3 + i * beta) * 2.0 for i in range(4)
    ])
    assert_allclose(out, expect, atol=1e-12)


def test_positions_straight_zero(params):
    act = ActuationParams()
    out = motor_positions(ContinuumConfig(params.theta0, 1.0), params, act)
    assert_allclose(out, np.zeros(4), atol=1e-15)


def test_positions_known_value(params):
    # the bend that shortens tendon 1 by 0.9 mm puts its motor at -1/6 rad
    act = ActuationParams()
    cfg = ContinuumConfig(params.theta0 - 0.5, 0.0)
    lengths = tendon_lengths(cfg, params)
    assert lengths[0] == pytest.approx(-0.9e-3)
    out = motor_positions(cfg, params, act)
    assert out[0] == pytest.approx(-1.0 / 6.0)
    assert_allclose(out, lengths / act.R_pulley, atol=1e-15)


def test_antipodal_mirror(params):
    act = ActuationParams()
    rng = np.random.default_rng(81)
    for _ in range(200):
        cfg = ContinuumConfig(*random_bend(rng, params))
        m = motor_positions(cfg, params, act)
        assert m[0] == pytest.approx(-m[2], abs=1e-12)
        assert m[1] == pytest.approx(-m[3], abs=1e-12)


def test_velocity_integrates_to_position(params):
    # quadrature along a psi path lands on the endpoint positions
    act = ActuationParams()
    t = np.linspace(0.0, 1.0, 4001)
    dt = t[1] - t[0]
    theta = params.theta0 - 0.6 * np.sin(np.pi * t / 2) ** 2
    delta = 0.8 * t
    start = ContinuumConfig(theta[0], delta[0])
    acc = motor_positions(start, params, act).copy()
    for k in range(len(t) - 1):
        mid = ContinuumConfig(0.5 * (theta[k] + theta[k + 1]),
                              0.5 * (delta[k] + delta[k + 1]))
        psi_dot = np.array([theta[k + 1] - theta[k],
                            delta[k + 1] - delta[k]]) / dt
        acc += motor_velocities(mid, psi_dot, params, act) * dt
    end = motor_positions(ContinuumConfig(theta[-1], delta[-1]), params, act)
    assert_allclose(acc, end, atol=1e-6)


def test_position_is_path_independent(params):
    # same endpoint through two different paths gives identical positions
    act = ActuationParams()
    end = ContinuumConfig(1.05, -0.7)
    direct = motor_positions(end, params, act)
    again = motor_positions(ContinuumConfig(1.05, -0.7), params, act)
    assert_allclose(direct, again)
    # and the function only reads (theta, delta), nothing stateful
    motor_positions(ContinuumConfig(0.9, 2.0), params, act)
    assert_allclose(motor_positions(end, params, act), direct)
