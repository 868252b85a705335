"""7-DoF serial arm: classic DH forward kinematics and geometric Jacobians.

Frame {7} is the arm flange; the instrument feed frame {ins} sits a fixed
rigid-segment offset further along the tool axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Pose, compose

REVOLUTE = "revolute"
PRISMATIC = "prismatic"


@dataclass(frozen=True)
class DHRow:
    """One classic DH link row. theta_offset adds to the joint variable for
    revolute joints; d is the joint variable offset for prismatic ones."""

    theta_offset: float
    d: float
    alpha: float
    a: float


# desk arm link table, lengths in meters
DEFAULT_DH: tuple[DHRow, ...] = (
    DHRow(0.0, 0.267, 0.0, 0.0),
    DHRow(0.0, 0.0, -np.pi / 2.0, 0.0),
    DHRow(0.0, 0.293, np.pi / 2.0, 0.0),
    DHRow(0.0, 0.0, np.pi / 2.0, 0.0525),
    DHRow(0.0, 0.3425, np.pi / 2.0, 0.0775),
    DHRow(0.0, 0.0, np.pi / 2.0, 0.0),
    DHRow(0.0, 0.097, -np.pi / 2.0, 0.076),
)

# rigid instrument segment: {ins} is 230 mm along the flange z-axis
DEFAULT_TOOL_OFFSET = Pose(np.eye(3), np.array([0.0, 0.0, 0.230]))


def link_transform(row: DHRow, q: float, joint_type: str = REVOLUTE) -> Pose:
    """Classic DH link matrix for joint value q."""
    if joint_type == REVOLUTE:
        th, d = q + row.theta_offset, row.d
    elif joint_type == PRISMATIC:
        th, d = row.theta_offset, row.d + q
    else:
        raise ValueError(f"unknown joint type {joint_type!r}")
    ct, st = np.cos(th), np.sin(th)
    ca, sa = np.cos(row.alpha), np.sin(row.alpha)
    R = np.array([
        [ct, -ca * st, sa * st],
        [st, ca * ct, -sa * ct],
        [0.0, sa, ca],
    ])
    p = np.array([row.a * ct, row.a * st, d])
    return Pose(R, p)


def chain_frames(
    q: np.ndarray,
    dh: tuple[DHRow, ...] = DEFAULT_DH,
    joint_types: tuple[str, ...] | None = None,
) -> list[Pose]:
    """Base-frame poses of frames {0}..{n}; element 0 is identity."""
    q = np.asarray(q, dtype=float)
    if q.shape != (len(dh),):
        raise ValueError(f"expected {len(dh)} joint values, got shape {q.shape}")
    if joint_types is None:
        joint_types = (REVOLUTE,) * len(dh)
    frames = [Pose()]
    for row, qk, jt in zip(dh, q, joint_types):
        frames.append(compose(frames[-1], link_transform(row, qk, jt)))
    return frames


def forward_kinematics(
    q: np.ndarray,
    dh: tuple[DHRow, ...] = DEFAULT_DH,
    tool: Pose = DEFAULT_TOOL_OFFSET,
) -> tuple[Pose, Pose]:
    """Returns (T_ee, T_ins): flange and instrument feed frame in base."""
    frames = chain_frames(q, dh)
    T_ee = frames[-1]
    return T_ee, compose(T_ee, tool)


def geometric_jacobian(
    frames: list[Pose],
    target: np.ndarray,
    joint_types: tuple[str, ...] | None = None,
) -> np.ndarray:
    """6xN geometric Jacobian of the point `target` (base frame) carried by
    the last link, from precomputed chain frames. Linear rows first.

    Revolute column k: [z_{k-1} x (target - o_{k-1}); z_{k-1}];
    prismatic column: [z_{k-1}; 0]. The prismatic branch is kept for
    generality; the desk arm is all-revolute.
    """
    n = len(frames) - 1
    if joint_types is None:
        joint_types = (REVOLUTE,) * n
    J = np.zeros((6, n))
    target = np.asarray(target, dtype=float)
    for k in range(n):
        z = frames[k].R[:, 2]
        if joint_types[k] == REVOLUTE:
            J[:3, k] = np.cross(z, target - frames[k].p)
            J[3:, k] = z
        else:
            J[:3, k] = z
    return J
