"""Clutched leader-follower mapping from a stylus to the instrument tip.

While the clutch is engaged, stylus motion relative to its pose at engage
time is conjugated into the tip frame and applied to the tip pose captured
at the same instant. Releasing the clutch freezes the desired pose; the
stylus can be repositioned freely and re-engaged (the usual ratcheting
workflow).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, compose, invert


@dataclass
class TeleopParams:
    """registration: haptic base frame expressed in the robot base frame.
    motion_scale scales translations only; rotations map one to one."""

    registration: Pose = field(default_factory=Pose)
    motion_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.motion_scale <= 10.0:
            raise ValueError("motion_scale must be in (0, 10]")


@dataclass
class ClutchSession:
    """Anchors captured at engage time plus the cached conjugation transform."""

    stylus_anchor: Pose
    tip_anchor: Pose
    conj: Pose           # X = tip_anchor^-1 * registration * stylus_anchor
    conj_inv: Pose
    scale: float
    active: bool = True


def start_clutch(stylus: Pose, tip: Pose, params: TeleopParams) -> ClutchSession:
    """Engage: capture both anchors and precompute the frame change X that
    carries stylus-relative motion into the tip frame."""
    stylus.assert_valid()
    X = compose(compose(invert(tip), params.registration), stylus)
    return ClutchSession(
        stylus_anchor=stylus.copy(), tip_anchor=tip.copy(),
        conj=X, conj_inv=invert(X), scale=params.motion_scale)


def desired_tip_pose(session: ClutchSession, stylus: Pose) -> Pose:
    """Desired tip pose for the current stylus pose.

    rel is the stylus displacement in the anchor frame; its translation is
    scaled, the result conjugated by X into tip-local coordinates and
    applied to the tip anchor. Stylus at the anchor returns the tip anchor
    exactly.
    """
    if not session.active:
        raise RuntimeError("clutch session not active")
    rel = compose(invert(session.stylus_anchor), stylus)
    rel_scaled = Pose(rel.R.copy(), session.scale * rel.p)
    motion = compose(compose(session.conj, rel_scaled), session.conj_inv)
    return compose(session.tip_anchor, motion)


def release_clutch(session: ClutchSession):
    """Disengage: further stylus motion must not move the desired pose."""
    session.active = False
