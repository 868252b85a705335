"""Reference tip trajectories for simulation runs.

Planar paths are laid out in the plane orthogonal to the tip z-axis at the
start pose, spanned by the start pose's x/y axes, so a path drawn for a
downward-pointing instrument stays parallel to the desk. Orientation along
the path follows a policy: fixed (hold the start orientation), tangent
(yaw the start frame so its x-axis follows the path tangent), or wobble
(tilt about a rotating in-plane axis, used to force linear/angular task
conflict).

The bend_sweep kind is different in nature: it scripts a (theta, delta)
profile, converts it to tip poses through the locked-arm forward chain,
and reports the scripted profile alongside each pose so a run can measure
configuration-space tracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..continuum import ContinuumConfig, tip_pose as segment_tip_pose
from ..geometry import Pose, axis_angle, compose
from ..rcm import AugmentedState, KinematicModel
from ..manipulator import chain_frames

KINDS = ("circle", "square", "sinusoid", "arc", "bend_sweep", "hold")
ORIENTATIONS = ("fixed", "tangent", "wobble")


@dataclass
class TrajectoryConfig:
    kind: str = "circle"
    duration: float = 20.0     # seconds
    samples: int = 500         # ZOH waypoints (square uses points_per_side)

    # circle / arc
    radius: float = 0.015
    sweep_deg: float = 143.24  # arc only: 2 cm radius * 2.5 rad ~ 5 cm path

    # square
    side: float = 0.023
    points_per_side: int = 500

    # sinusoid
    length: float = 0.05
    amplitude: float = 0.003
    cycles: float = 1.0

    # orientation policy
    orientation: str = "fixed"
    wobble_deg: float = 0.0
    wobble_cycles: float = 2.0

    # bend_sweep (radians); split = fraction of duration spent on theta
    theta_from: float = 1.535
    theta_to: float = 0.785
    delta_from: float = 0.0
    delta_to: float = np.pi
    split: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation policy {self.orientation!r}")
        if self.duration <= 0.0 or self.samples < 2:
            raise ValueError("need positive duration and at least 2 samples")


@dataclass
class Waypoint:
    t: float
    pose: Pose | None            # None: no command (hold kind) -> idle control
    psi_cmd: tuple[float, float] | None = None  # bend_sweep only


def _orient(R0: np.ndarray, cfg: TrajectoryConfig, s: float,
            tangent_yaw: float) -> np.ndarray:
    """Orientation at path parameter s in [0, 1]."""
    if cfg.orientation == "fixed":
        return R0
    if cfg.orientation == "tangent":
        # yaw about the plane normal (tip z) so x tracks the tangent
        return R0 @ np.array([
            [np.cos(tangent_yaw), -np.sin(tangent_yaw), 0.0],
            [np.sin(tangent_yaw), np.cos(tangent_yaw), 0.0],
            [0.0, 0.0, 1.0]])
    # wobble: tilt about an in-plane axis that itself rotates with s
    amp = np.radians(cfg.wobble_deg) * np.sin(2.0 * np.pi * cfg.wobble_cycles * s)
    ax_ang = 2.0 * np.pi * cfg.wobble_cycles * s
    axis = np.cos(ax_ang) * R0[:, 0] + np.sin(ax_ang) * R0[:, 1]
    return axis_angle(axis, amp) @ R0


def _planar_points(cfg: TrajectoryConfig) -> tuple[np.ndarray, np.ndarray]:
    """Path in plane coordinates (n x 2) plus tangent yaw per point."""
    if cfg.kind == "circle":
        phi = np.linspace(0.0, 2.0 * np.pi, cfg.samples)
        xy = cfg.radius * np.stack([np.cos(phi) - 1.0, np.sin(phi)], axis=1)
        yaw = phi + np.pi / 2.0
        return xy, yaw
    if cfg.kind == "arc":
        sweep = np.radians(cfg.sweep_deg)
        phi = np.linspace(0.0, sweep, cfg.samples)
        xy = cfg.radius * np.stack([np.cos(phi) - 1.0, np.sin(phi)], axis=1)
        return xy, phi + np.pi / 2.0
    if cfg.kind == "sinusoid":
        x = np.linspace(0.0, cfg.length, cfg.samples)
        y = cfg.amplitude * np.sin(2.0 * np.pi * cfg.cycles * x / cfg.length)
        dy = (2.0 * np.pi * cfg.cycles * cfg.amplitude / cfg.length) * \
            np.cos(2.0 * np.pi * cfg.cycles * x / cfg.length)
        return np.stack([x, y], axis=1), np.arctan2(dy, np.ones_like(dy))
    if cfg.kind == "square":
        corners = np.array([[0.0, 0.0], [cfg.side, 0.0],
                            [cfg.side, cfg.side], [0.0, cfg.side], [0.0, 0.0]])
        pts, yaw = [], []
        for a, b in zip(corners[:-1], corners[1:]):
            frac = np.arange(cfg.points_per_side) / cfg.points_per_side
            pts.append(a + frac[:, None] * (b - a))
            yaw.append(np.full(cfg.points_per_side,
                               np.arctan2(b[1] - a[1], b[0] - a[0])))
        return np.concatenate(pts), np.concatenate(yaw)
    raise ValueError(cfg.kind)


def generate(
    cfg: TrajectoryConfig,
    start: Pose,
    kin: KinematicModel | None = None,
    state0: AugmentedState | None = None,
) -> list[Waypoint]:
    """Waypoint list with monotone timestamps covering [0, duration)."""
    if cfg.kind == "bend_sweep":
        if kin is None or state0 is None:
            raise ValueError("bend_sweep needs the kinematic model and state")
        return _bend_sweep(cfg, kin, state0)
    if cfg.kind == "hold":
        # no command at all: the controller idles (RCM constraint + lam
        # recentering only), which is the "zero commands" regime
        times = np.arange(cfg.samples) * (cfg.duration / cfg.samples)
        return [Waypoint(float(t), None) for t in times]
    xy, yaw = _planar_points(cfg)
    n = xy.shape[0]
    times = np.arange(n) * (cfg.duration / n)
    e1, e2 = start.R[:, 0], start.R[:, 1]
    out = []
    for i in range(n):
        p = start.p + xy[i, 0] * e1 + xy[i, 1] * e2
        R = _orient(start.R, cfg, i / max(n - 1, 1), yaw[i])
        out.append(Waypoint(float(times[i]), Pose(R, p)))
    return out


def _bend_sweep(cfg: TrajectoryConfig, kin: KinematicModel,
                state0: AugmentedState) -> list[Waypoint]:
    """theta ramp then delta ramp, through the locked arm chain."""
    ins = compose(chain_frames(state0.q_arm, kin.dh)[-1], kin.tool)
    n = cfg.samples
    times = np.arange(n) * (cfg.duration / n)
    t_split = cfg.split * cfg.duration
    out = []
    for i in range(n):
        t = float(times[i])
        if t <= t_split:
            u = t / t_split if t_split > 0.0 else 1.0
            th = cfg.theta_from + u * (cfg.theta_to - cfg.theta_from)
            de = cfg.delta_from
        else:
            u = (t - t_split) / max(cfg.duration - t_split, 1e-12)
            th = cfg.theta_to
            de = cfg.delta_from + u * (cfg.delta_to - cfg.delta_from)
        pose = compose(ins, segment_tip_pose(ContinuumConfig(th, de), kin.continuum))
        out.append(Waypoint(t, pose, psi_cmd=(th, de)))
    return out
