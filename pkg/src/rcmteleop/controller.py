"""Resolved motion rate control toward a desired tip pose.

Speed scheduling: the commanded speed saturates at v_mx while the error
norm exceeds gamma * epsilon, then interpolates linearly down to v_mn at an
error of gamma. Below the dead band no motion is commanded at all. The
same profile applies to the angular channel with its own constants.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import Twist, rotation_error
from .continuum import ContinuumConfig
from .rcm import AugmentedState, JacobianBundle, KinematicModel, LAMBDA_BOUNDS, assemble
from .solver import PriorityCase, SolverConfig, solve, solve_idle, solve_segment_only

log = logging.getLogger(__name__)

DEAD_BAND = 1e-9


@dataclass(frozen=True)
class RateParams:
    """Speed profile constants. Linear in m/s and m, angular in rad/s, rad."""

    v_mx: float = 0.020
    v_mn: float = 0.001
    w_mx: float = 0.5
    w_mn: float = 0.02
    gamma_p: float = 0.001
    gamma_o: float = 0.01
    eps_p: float = 5.0
    eps_o: float = 5.0
    k_rcm: float = 50.0  # 1/s, pulls the pinned shaft point back onto the trocar

    def __post_init__(self):
        if not 0.0 < self.v_mn <= self.v_mx:
            raise ValueError("need 0 < v_mn <= v_mx")
        if not 0.0 < self.w_mn <= self.w_mx:
            raise ValueError("need 0 < w_mn <= w_mx")
        if self.gamma_p <= 0.0 or self.gamma_o <= 0.0:
            raise ValueError("gamma thresholds must be positive")
        if self.eps_p <= 1.0 or self.eps_o <= 1.0:
            raise ValueError("epsilon multipliers must exceed 1")
        if self.k_rcm < 0.0:
            raise ValueError("k_rcm must be nonnegative")


def scheduled_speed(err: float, mn: float, mx: float, gamma: float, eps: float) -> float:
    """Piecewise speed magnitude for one channel."""
    if err > gamma * eps:
        return mx
    chi = (err - gamma) / (gamma * (eps - 1.0))
    chi = min(max(chi, 0.0), 1.0)
    return mn + (mx - mn) * chi


def pose_errors(desired, current) -> tuple[np.ndarray, np.ndarray]:
    """(e_p, e_o): translation error and axis-angle orientation error."""
    return desired.p - current.p, rotation_error(desired.R, current.R)


def desired_twist(e_p: np.ndarray, e_o: np.ndarray, rp: RateParams) -> Twist:
    """Bounded twist along the error directions; zero inside the dead band."""
    np_, no = np.linalg.norm(e_p), np.linalg.norm(e_o)
    v = np.zeros(3)
    w = np.zeros(3)
    if np_ > DEAD_BAND:
        v = scheduled_speed(np_, rp.v_mn, rp.v_mx, rp.gamma_p, rp.eps_p) * (e_p / np_)
    if no > DEAD_BAND:
        w = scheduled_speed(no, rp.w_mn, rp.w_mx, rp.gamma_o, rp.eps_o) * (e_o / no)
    return Twist(v, w)


@dataclass
class ControlTick:
    """Everything one control step produced, for logging and monitoring."""

    dt: float
    twist: Twist
    e_p: np.ndarray
    e_o: np.ndarray
    qdot: np.ndarray
    bundle: JacobianBundle
    fault: bool = False
    idle: bool = False
    theta_clamped: bool = False
    lam_clamped: bool = False


def integrate(
    state: AugmentedState,
    qdot: np.ndarray,
    dt: float,
    kin: KinematicModel,
    lam_bounds: tuple[float, float] = LAMBDA_BOUNDS,
) -> tuple[AugmentedState, bool, bool]:
    """Euler step with delta wrapping and theta / lam clamping.

    Returns (new_state, theta_clamped, lam_clamped).
    """
    v = state.vector() + dt * np.asarray(qdot, dtype=float)
    cp = kin.continuum
    theta = v[7]
    theta_cl = not (cp.theta_min <= theta <= cp.theta0)
    if theta_cl:
        theta = min(max(theta, cp.theta_min), cp.theta0)
    lam = v[9]
    lam_cl = not (lam_bounds[0] <= lam <= lam_bounds[1])
    if lam_cl:
        lam = min(max(lam, lam_bounds[0]), lam_bounds[1])
    psi = ContinuumConfig(theta, v[8]).clamped(cp)
    new = AugmentedState(v[:7], ContinuumConfig(theta, psi.delta), lam)
    return new, theta_cl, lam_cl


def step(
    state: AugmentedState,
    desired,
    case: PriorityCase,
    kin: KinematicModel,
    solver_cfg: SolverConfig,
    rate: RateParams,
    dt: float,
    arm_locked: bool = False,
    lam_bounds: tuple[float, float] = LAMBDA_BOUNDS,
    trocar: np.ndarray | None = None,
) -> tuple[AugmentedState, ControlTick]:
    """One resolved-rate step toward `desired` (a Pose, or None for idle).

    With no desired pose, or with both error norms inside the dead band,
    there is no command: only the RCM constraint stays active and the lam
    setpoint objective gets the whole remaining null space (its only
    chance to move lam; the full stack pins the shaft completely).

    Passing the trocar point turns the constraint level into a closed
    loop: the rate k_rcm (trocar - p_rcm) pulls the pinned shaft point
    back, so clamping (which makes the executed rates differ from the
    solved ones) cannot let the constraint drift tick over tick.

    On a non-finite solve the state is returned unchanged with the fault
    flag set; the caller decides whether to stop the run.
    """
    bundle = assemble(state, kin)
    if desired is None:
        e_p, e_o = np.zeros(3), np.zeros(3)
    else:
        e_p, e_o = pose_errors(desired, bundle.tip_pose)
    tw = desired_twist(e_p, e_o, rate)
    idle = (np.linalg.norm(e_p) < DEAD_BAND and np.linalg.norm(e_o) < DEAD_BAND)
    rcm_rate = None
    if trocar is not None:
        rcm_rate = rate.k_rcm * (np.asarray(trocar, dtype=float) - bundle.p_rcm)
    if arm_locked:
        qdot = solve_segment_only(bundle, tw, solver_cfg, case)
    elif idle:
        qdot = solve_idle(bundle, solver_cfg, rcm_rate)
    else:
        qdot = solve(case, bundle, tw, solver_cfg, rcm_rate=rcm_rate)
    if not np.all(np.isfinite(qdot)):
        log.warning("non-finite joint rates, holding state")
        tick = ControlTick(dt, tw, e_p, e_o, np.zeros(10), bundle, fault=True)
        return state.copy(), tick
    new_state, theta_cl, lam_cl = integrate(state, qdot, dt, kin, lam_bounds)
    if theta_cl:
        log.debug("theta clamped to bend limits")
    if lam_cl:
        log.debug("lam clamped to %s", lam_bounds)
    tick = ControlTick(dt, tw, e_p, e_o, qdot, bundle, idle=idle,
                       theta_clamped=theta_cl, lam_clamped=lam_cl)
    return new_state, tick
