"""Remote-center-of-motion augmentation.

The arm carries a rigid instrument shaft from the flange {7} to the feed
frame {ins}; the continuum segment bends distal to {ins}. A trocar pins one
shaft point: p_rcm = p_ee + lam (p_ins - p_ee), lam in (0, 1) parameterizing
where along the shaft the trocar sits. The augmented configuration is

    q_aug = [q_arm (7), theta, delta, lam]  in R^10

and the stacked constraint Jacobian maps q_aug rates to the tip twist (6)
over the RCM point velocity (3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .continuum import ContinuumConfig, ContinuumParams, tip_pose as segment_tip_pose, \
    instrument_jacobian
from .geometry import Pose, compose, skew
from .manipulator import DHRow, DEFAULT_DH, DEFAULT_TOOL_OFFSET, chain_frames, \
    geometric_jacobian

# allowed trocar parameter range; endpoints keep the constraint Jacobian
# column d_ins meaningful (lam at 0/1 pins the constraint to ee/ins exactly)
LAMBDA_BOUNDS = (0.02, 0.98)


@dataclass(frozen=True)
class KinematicModel:
    """Arm + rigid shaft + continuum segment, as one unit."""

    dh: tuple[DHRow, ...] = DEFAULT_DH
    tool: Pose = field(default_factory=lambda: DEFAULT_TOOL_OFFSET.copy())
    continuum: ContinuumParams = field(default_factory=ContinuumParams)


@dataclass
class AugmentedState:
    q_arm: np.ndarray
    psi: ContinuumConfig
    lam: float

    def __post_init__(self):
        self.q_arm = np.asarray(self.q_arm, dtype=float).reshape(7)

    def vector(self) -> np.ndarray:
        return np.concatenate([
            self.q_arm, [self.psi.theta, self.psi.delta, self.lam]])

    @staticmethod
    def from_vector(v: np.ndarray) -> "AugmentedState":
        v = np.asarray(v, dtype=float).reshape(10)
        return AugmentedState(v[:7].copy(), ContinuumConfig(v[7], v[8]), float(v[9]))

    def copy(self) -> "AugmentedState":
        return AugmentedState(self.q_arm.copy(),
                              ContinuumConfig(self.psi.theta, self.psi.delta),
                              self.lam)


@dataclass
class JacobianBundle:
    """Every Jacobian and pose used by the controller, evaluated at one state.

    j_tip is the 6x9 map from (q_arm_dot, psi_dot) to the base-frame tip
    twist; j_tip10 / j_rcm / j_aug are the lam-augmented 10-column blocks.
    """

    ee_pose: Pose
    ins_pose: Pose
    tip_pose: Pose
    lam: float
    j_ee: np.ndarray       # 6x7
    j_ins: np.ndarray      # 6x7
    j_xpsi: np.ndarray     # 6x2, ins-frame segment Jacobian
    j_tip: np.ndarray      # 6x9
    j_rcm: np.ndarray      # 3x10
    j_aug: np.ndarray      # 9x10

    @property
    def j_tip10(self) -> np.ndarray:
        return self.j_aug[:6]

    @property
    def j_lin(self) -> np.ndarray:
        return self.j_aug[:3]

    @property
    def j_ang(self) -> np.ndarray:
        return self.j_aug[3:6]

    @property
    def p_rcm(self) -> np.ndarray:
        return rcm_point_from_poses(self.ee_pose.p, self.ins_pose.p, self.lam)


def rcm_point_from_poses(p_ee: np.ndarray, p_ins: np.ndarray, lam: float) -> np.ndarray:
    return p_ee + lam * (p_ins - p_ee)


def rcm_point(state: AugmentedState, kin: KinematicModel) -> np.ndarray:
    """Shaft point pinned by the trocar, in the base frame."""
    frames = chain_frames(state.q_arm, kin.dh)
    p_ee = frames[-1].p
    p_ins = compose(frames[-1], kin.tool).p
    return rcm_point_from_poses(p_ee, p_ins, state.lam)


def assemble(state: AugmentedState, kin: KinematicModel) -> JacobianBundle:
    """One forward pass: all frames, the tip pose, and the stacked Jacobians."""
    frames = chain_frames(state.q_arm, kin.dh)
    ee = frames[-1]
    ins = compose(ee, kin.tool)
    seg = segment_tip_pose(state.psi, kin.continuum)
    tip = compose(ins, seg)

    j_ee = geometric_jacobian(frames, ee.p)
    j_ins = geometric_jacobian(frames, ins.p)

    # arm-induced tip twist: carry the {ins} twist to the tip point
    n = ins.p - tip.p
    j_aux = j_ins.copy()
    j_aux[:3] += skew(n) @ j_ins[3:]

    # segment-induced tip twist, rotated from {ins} into the base frame
    j_xpsi = instrument_jacobian(state.psi, kin.continuum)
    j_xpsi_b = np.vstack([ins.R @ j_xpsi[:3], ins.R @ j_xpsi[3:]])

    j_tip = np.hstack([j_aux, j_xpsi_b])

    d_ins = ins.p - ee.p
    j_rcm = np.zeros((3, 10))
    j_rcm[:, :7] = j_ee[:3] + state.lam * (j_ins[:3] - j_ee[:3])
    j_rcm[:, 9] = d_ins

    j_aug = np.zeros((9, 10))
    j_aug[:6, :9] = j_tip
    j_aug[6:] = j_rcm

    return JacobianBundle(
        ee_pose=ee, ins_pose=ins, tip_pose=tip, lam=state.lam,
        j_ee=j_ee, j_ins=j_ins, j_xpsi=j_xpsi, j_tip=j_tip,
        j_rcm=j_rcm, j_aug=j_aug)
