"""Constant-curvature continuum segment: tendon map, arc kinematics, Jacobians.

The segment bends as a circular arc of fixed central backbone length L.
Configuration is psi = (theta, delta): theta is the tip tangent angle in the
bending plane with theta0 = pi/2 meaning straight, and delta rotates the
bending plane about the base z-axis. Four tendons sit on a pitch circle of
radius r at division angle beta = pi/2, so tendons 1/3 and 2/4 are antipodal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Pose, rot_y, rot_z, wrap_angle

# below this |theta0 - theta| the arc terms switch to series form
SERIES_EPS = 1e-4

# ||l|| below this is treated as straight (delta unobservable)
STRAIGHT_TOL = 1e-8


@dataclass(frozen=True)
class ContinuumParams:
    """Geometry of the bending segment. Lengths in meters.

    L: central backbone arc length
    r: pitch circle radius of the tendon attachment points
    n_tendons, beta: tendon count and division angle; the kinematics below
        assume the 4-tendon, beta = pi/2 layout and the constructor enforces
        it rather than silently producing wrong signs
    theta0: straight-configuration tip angle
    theta_min: tightest allowed bend
    """

    L: float = 0.030
    r: float = 0.0018
    n_tendons: int = 4
    beta: float = np.pi / 2.0
    theta0: float = np.pi / 2.0
    theta_min: float = np.pi / 18.0

    def __post_init__(self):
        if self.L <= 0.0 or self.r <= 0.0:
            raise ValueError("L and r must be positive")
        if self.n_tendons != 4 or self.beta != np.pi / 2.0:
            raise ValueError("tendon layout must be 4 tendons at beta = pi/2")
        if self.theta0 != np.pi / 2.0:
            raise ValueError("theta0 must be pi/2")
        if not 0.0 < self.theta_min < self.theta0:
            raise ValueError("theta_min must lie in (0, theta0)")


@dataclass
class ContinuumConfig:
    """psi = (theta, delta), radians."""

    theta: float
    delta: float

    def clamped(self, params: ContinuumParams) -> "ContinuumConfig":
        th = min(max(self.theta, params.theta_min), params.theta0)
        return ContinuumConfig(th, wrap_angle(self.delta))


def tendon_angles(delta: float, params: ContinuumParams) -> np.ndarray:
    """delta_i = delta + (i-1) beta for i = 1..n."""
    return delta + np.arange(params.n_tendons) * params.beta


def tendon_lengths(cfg: ContinuumConfig, params: ContinuumParams) -> np.ndarray:
    """Tendon displacements l_i = r cos(delta_i) (theta - theta0).

    Negative l_i means the tendon is pulled. Antipodal pairs satisfy
    l_1 = -l_3 and l_2 = -l_4 by construction.
    """
    d = tendon_angles(cfg.delta, params)
    return params.r * np.cos(d) * (cfg.theta - params.theta0)


def config_from_tendons(
    ell: np.ndarray,
    params: ContinuumParams,
    prev_delta: float = 0.0,
    straight_tol: float = STRAIGHT_TOL,
) -> tuple[ContinuumConfig, bool]:
    """Invert the tendon map. Returns (config, straight_flag).

    Near straight every tendon displacement vanishes and delta is
    unobservable, so the caller supplies the delta to hold (last commanded
    value); straight_flag marks that branch. theta is recovered from the
    tendon with the best-conditioned cos(delta_i).
    """
    ell = np.asarray(ell, dtype=float)
    if np.linalg.norm(ell) < straight_tol:
        return ContinuumConfig(params.theta0, wrap_angle(prev_delta)), True
    cb, sb = np.cos(params.beta), np.sin(params.beta)
    delta = float(np.arctan2(ell[1] - ell[0] * cb, -ell[0] * sb))
    d = tendon_angles(delta, params)
    k = int(np.argmax(np.abs(np.cos(d))))
    theta = params.theta0 + ell[k] / (params.r * np.cos(d[k]))
    return ContinuumConfig(theta, wrap_angle(delta)), False


def _arc_terms(theta: float, params: ContinuumParams):
    """In-plane tip coordinates (u, w) and their theta-derivatives.

    u is the coordinate along the base x-axis of the bending plane, w along
    the base z-axis. For the circular arc of bend radius rho = L/(theta0 -
    theta):

        u = rho (1 - sin theta),  w = rho cos theta

    Both are 0/0 at theta = theta0; the series branch (assumes theta0 =
    pi/2, enforced by ContinuumParams) keeps them and the derivatives
    smooth through straight.
    """
    L = params.L
    eps = params.theta0 - theta
    if abs(eps) < SERIES_EPS:
        e2 = eps * eps
        u = L * (eps / 2.0 - eps * e2 / 24.0)
        w = L * (1.0 - e2 / 6.0 + e2 * e2 / 120.0)
        # derivatives w.r.t. theta = -(d/d eps)
        du = -L * (0.5 - e2 / 8.0 + e2 * e2 / 144.0)
        dw = L * (eps / 3.0 - eps * e2 / 30.0)
        return u, w, du, dw
    st, ct = np.sin(theta), np.cos(theta)
    u = L * (1.0 - st) / eps
    w = L * ct / eps
    du = L * ((1.0 - st) - ct * eps) / (eps * eps)
    dw = L * (ct - st * eps) / (eps * eps)
    return u, w, du, dw


def tip_pose(cfg: ContinuumConfig, params: ContinuumParams) -> Pose:
    """Pose of the segment tip in the segment base frame.

    Bending plane construction: rotate into the plane by Rz(-delta), bend by
    Ry(theta0 - theta), rotate back by Rz(delta). Position is the in-plane
    arc point swung by Rz(-delta).
    """
    u, w, _, _ = _arc_terms(cfg.theta, params)
    cd, sd = np.cos(cfg.delta), np.sin(cfg.delta)
    p = np.array([cd * u, -sd * u, w])
    R = rot_z(-cfg.delta) @ rot_y(params.theta0 - cfg.theta) @ rot_z(cfg.delta)
    return Pose(R, p)


def instrument_jacobian(cfg: ContinuumConfig, params: ContinuumParams) -> np.ndarray:
    """6x2 body-base Jacobian J_xpsi mapping (theta_dot, delta_dot) to the
    tip twist expressed in the segment base frame. Linear rows first.
    """
    u, _, du, dw = _arc_terms(cfg.theta, params)
    cd, sd = np.cos(cfg.delta), np.sin(cfg.delta)
    ct, st = np.cos(cfg.theta), np.sin(cfg.theta)
    return np.array([
        [cd * du, -sd * u],
        [-sd * du, -cd * u],
        [dw, 0.0],
        [-sd, cd * ct],
        [-cd, -sd * ct],
        [0.0, st - 1.0],
    ])


def actuation_jacobian(cfg: ContinuumConfig, params: ContinuumParams) -> np.ndarray:
    """4x2 Jacobian J_lpsi of tendon displacements w.r.t. (theta, delta)."""
    d = tendon_angles(cfg.delta, params)
    return np.stack([
        params.r * np.cos(d),
        -params.r * (cfg.theta - params.theta0) * np.sin(d),
    ], axis=1)
