from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rcmteleop.continuum import (
    SERIES_EPS,
    ContinuumConfig,
    ContinuumParams,
    actuation_jacobian,
    config_from_tendons,
    instrument_jacobian,
    tendon_lengths,
    tip_pose,
)
from rcmteleop.geometry import rot_z

from conftest import random_bend


def offset_arc_length(theta, delta, i, params, n=20000):
    """Independent geometric oracle: polyline length of tendon i's path.

    The tendon runs parallel to the backbone at radius r in the bending
    plane, i.e. along a circular arc whose radius differs from the
    backbone's by the projection r cos(delta_i). Build the 3D polyline from
    scratch and measure it.
    """
    phi_total = params.theta0 - theta
    rho = params.L / phi_total
    d_i = delta + i * params.beta
    # the arc center sits at [rho, 0, 0] in plane coords; the tendon offset
    # points along the cross-section radial direction (toward the center for
    # cos(delta_i) > 0) plus a constant out-of-plane component
    center = np.array([rho, 0.0, 0.0])
    ey = np.array([0.0, 1.0, 0.0])
    phis = np.linspace(0.0, phi_total, n)
    pts = []
    for phi in phis:
        base = np.array([rho * (1 - np.cos(phi)), 0.0, rho * np.sin(phi)])
        toward_center = (center - base) / rho
        off = params.r * np.cos(d_i) * toward_center + params.r * np.sin(d_i) * ey
        pts.append(base + off)
    pts = np.asarray(pts)
    return np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1))


def test_tendon_lengths_against_arc_geometry(params):
    rng = np.random.default_rng(21)
    for _ in range(20):
        theta = rng.uniform(params.theta_min, params.theta0 - 0.05)
        delta = rng.uniform(-np.pi, np.pi)
        ell = tendon_lengths(ContinuumConfig(theta, delta), params)
        for i in range(4):
            path = offset_arc_length(theta, delta, i, params)
            # displacement = path length minus the straight length L
            assert ell[i] == pytest.approx(path - params.L, abs=2e-9)


def test_tendon_lengths_known_values(params):
    # half-radian bend in the delta = 0 plane: tendon 1 shortens by
    # r * 0.5 = 0.9 mm, tendon 3 lengthens by the same, 2/4 unchanged
    ell = tendon_lengths(ContinuumConfig(np.pi / 2 - 0.5, 0.0), params)
    assert_allclose(ell, [-0.0009, 0.0, 0.0009, 0.0], atol=1e-12)
    # straight: all zero
    assert_allclose(tendon_lengths(ContinuumConfig(np.pi / 2, 1.0), params),
                    np.zeros(4), atol=1e-15)


def test_tendon_antipodal_property(params):
    rng = np.random.default_rng(22)
    for _ in range(200):
        theta, delta = random_bend(rng, params)
        ell = tendon_lengths(ContinuumConfig(theta, delta), params)
        assert ell[0] == pytest.approx(-ell[2], abs=1e-15)
        assert ell[1] == pytest.approx(-ell[3], abs=1e-15)


def test_config_from_tendons_roundtrip(params):
    rng = np.random.default_rng(23)
    for _ in range(500):
        theta, delta = random_bend(rng, params)
        ell = tendon_lengths(ContinuumConfig(theta, delta), params)
        cfg, straight = config_from_tendons(ell, params)
        if straight:
            continue
        assert cfg.theta == pytest.approx(theta, abs=1e-9)
        # delta defined modulo the bending-plane symmetry, compare wrapped
        dd = (cfg.delta - delta + np.pi) % (2 * np.pi) - np.pi
        assert abs(dd) < 1e-9


def test_config_from_tendons_straight_branch(params):
    cfg, straight = config_from_tendons(np.zeros(4), params, prev_delta=0.7)
    assert straight
    assert cfg.theta == params.theta0
    assert cfg.delta == pytest.approx(0.7)


def test_params_validation():
    with pytest.raises(ValueError):
        ContinuumParams(L=-0.01)
    with pytest.raises(ValueError):
        ContinuumParams(n_tendons=3)
    with pytest.raises(ValueError):
        ContinuumParams(beta=np.pi / 3)
    with pytest.raises(ValueError):
        ContinuumParams(theta_min=2.0)


def circle_construction_tip(theta, delta, params):
    """Second route to the tip point: explicit arc circle in the bending
    plane, then swing the plane by delta about z."""
    phi = params.theta0 - theta
    rho = params.L / phi
    in_plane = np.array([rho * (1 - np.cos(phi)), 0.0, rho * np.sin(phi)])
    return rot_z(-delta) @ in_plane


def test_tip_position_against_circle_construction(params):
    rng = np.random.default_rng(24)
    for _ in range(300):
        theta = rng.uniform(params.theta_min, params.theta0 - 1e-3)
        delta = rng.uniform(-np.pi, np.pi)
        p = tip_pose(ContinuumConfig(theta, delta), params).p
        assert_allclose(p, circle_construction_tip(theta, delta, params), atol=1e-12)


def test_tip_pose_straight_limit(params):
    # a 1e-9 bend puts the tip L*eps/2 = 1.5e-11 m off axis, no closer;
    # the series branch resolves that correctly instead of flushing to zero
    p = tip_pose(ContinuumConfig(params.theta0 - 1e-9, 0.3), params)
    assert_allclose(p.p, [0, 0, params.L], atol=1e-10)
    assert np.hypot(p.p[0], p.p[1]) == pytest.approx(params.L * 1e-9 / 2, rel=1e-6)
    assert_allclose(p.R, np.eye(3), atol=1e-9)
    p0 = tip_pose(ContinuumConfig(params.theta0, -2.0), params)
    assert_allclose(p0.p, [0, 0, params.L], atol=1e-15)
    assert_allclose(p0.R, np.eye(3), atol=1e-15)


def test_tip_pose_quarter_circle(params):
    # theta = 0: quarter circle, tip at [2L/pi, 0, 2L/pi] tilted 90 degrees
    p = tip_pose(ContinuumConfig(0.0, 0.0), params)
    rho = params.L / (np.pi / 2)
    assert_allclose(p.p, [rho, 0.0, rho], atol=1e-15)
    assert_allclose(p.R @ [0, 0, 1], [1, 0, 0], atol=1e-15)


def test_tip_orientation_tangent(params):
    # tip z-axis must equal the arc tangent from the circle construction
    rng = np.random.default_rng(25)
    for _ in range(200):
        theta = rng.uniform(params.theta_min, params.theta0 - 1e-3)
        delta = rng.uniform(-np.pi, np.pi)
        R = tip_pose(ContinuumConfig(theta, delta), params).R
        phi = params.theta0 - theta
        tangent_plane = np.array([np.sin(phi), 0.0, np.cos(phi)])
        assert_allclose(R @ [0, 0, 1], rot_z(-delta) @ tangent_plane, atol=1e-12)


def test_arc_length_invariant(params):
    # whatever the bend, the reconstructed backbone arc length equals L
    rng = np.random.default_rng(26)
    for _ in range(200):
        theta = rng.uniform(params.theta_min, params.theta0 - 1e-3)
        delta = rng.uniform(-np.pi, np.pi)
        p = tip_pose(ContinuumConfig(theta, delta), params).p
        phi = params.theta0 - theta
        # chord length of a circular arc: 2 rho sin(phi/2)
        rho = np.linalg.norm(p) / (2 * np.sin(phi / 2))
        assert rho * phi == pytest.approx(params.L, abs=1e-12)


def test_series_branch_continuity(params):
    # pose and both jacobians stay continuous across the series switch
    for delta in (0.0, 1.1, -2.4):
        for sign in (+1.0, -1.0):
            th_a = params.theta0 - SERIES_EPS * (1 + 1e-9) * sign
            th_b = params.theta0 - SERIES_EPS * (1 - 1e-9) * sign
            pa = tip_pose(ContinuumConfig(th_a, delta), params)
            pb = tip_pose(ContinuumConfig(th_b, delta), params)
            assert_allclose(pa.p, pb.p, atol=1e-10)
            ja = instrument_jacobian(ContinuumConfig(th_a, delta), params)
            jb = instrument_jacobian(ContinuumConfig(th_b, delta), params)
            assert_allclose(ja, jb, atol=1e-8)


def fd_jacobian(f, x0, h=1e-6):
    cols = []
    for k in range(len(x0)):
        xp, xm = x0.copy(), x0.copy()
        xp[k] += h
        xm[k] -= h
        cols.append((f(xp) - f(xm)) / (2 * h))
    return np.stack(cols, axis=1)


def test_instrument_jacobian_linear_rows_fd(params):
    rng = np.random.default_rng(27)
    worst = 0.0
    for _ in range(300):
        theta, delta = random_bend(rng, params, near_straight_every=10)
        x0 = np.array([theta, delta])
        J = instrument_jacobian(ContinuumConfig(theta, delta), params)[:3]
        Jfd = fd_jacobian(lambda x: tip_pose(ContinuumConfig(*x), params).p, x0)
        worst = max(worst, np.abs(J - Jfd).max() / max(np.abs(Jfd).max(), 1e-2))
    assert worst < 1e-6


def test_instrument_jacobian_angular_rows_fd(params):
    # omega = vee(Rdot R^T) via central difference of the rotation
    rng = np.random.default_rng(28)
    h = 1e-7
    for _ in range(300):
        theta, delta = random_bend(rng, params, near_straight_every=10)
        Jw = instrument_jacobian(ContinuumConfig(theta, delta), params)[3:]
        for k, dx in enumerate(np.eye(2)):
            Rp = tip_pose(ContinuumConfig(theta + h * dx[0], delta + h * dx[1]), params).R
            Rm = tip_pose(ContinuumConfig(theta - h * dx[0], delta - h * dx[1]), params).R
            W = (Rp - Rm) / (2 * h) @ tip_pose(ContinuumConfig(theta, delta), params).R.T
            w_fd = np.array([W[2, 1], W[0, 2], W[1, 0]])
            assert_allclose(Jw[:, k], w_fd, atol=2e-6)


def test_actuation_jacobian_fd(params):
    rng = np.random.default_rng(29)
    for _ in range(300):
        theta, delta = random_bend(rng, params, near_straight_every=10)
        J = actuation_jacobian(ContinuumConfig(theta, delta), params)
        Jfd = fd_jacobian(
            lambda x: tendon_lengths(ContinuumConfig(*x), params),
            np.array([theta, delta]))
        assert_allclose(J, Jfd, atol=1e-9)


def test_clamped(params):
    c = ContinuumConfig(5.0, 9.0).clamped(params)
    assert c.theta == params.theta0
    assert -np.pi < c.delta <= np.pi
    c = ContinuumConfig(0.01, 0.0).clamped(params)
    assert c.theta == params.theta_min
