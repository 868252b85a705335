"""Rigid-body primitives: poses, twists, rotation helpers, orientation error.

Everything downstream works in rotation matrices; quaternions only appear at
the wire protocol layer (harness.protocol).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# branch switch for rotation_error near 0 and near pi
SMALL_ANGLE = 1e-6

# orthonormality tolerance used by Pose.assert_valid
ROT_TOL = 1e-9


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(v) @ u == cross(v, u)."""
    x, y, z = v
    return np.array([[0.0, -z, y],
                     [z, 0.0, -x],
                     [-y, x, 0.0]])


def rot_x(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    u = np.asarray(axis, dtype=float)
    n = np.linalg.norm(u)
    if n == 0.0:
        raise ValueError("zero axis")
    u = u / n
    K = skew(u)
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = np.remainder(a + np.pi, 2.0 * np.pi) - np.pi
    if w == -np.pi:
        w = np.pi
    return float(w)


@dataclass
class Pose:
    """Rigid transform from a body frame to the reference frame.

    R: 3x3 rotation, p: position in meters.
    """

    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    p: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.p = np.asarray(self.p, dtype=float).reshape(3)

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.p
        return T

    @staticmethod
    def from_matrix(T: np.ndarray) -> "Pose":
        T = np.asarray(T, dtype=float)
        return Pose(T[:3, :3].copy(), T[:3, 3].copy())

    def assert_valid(self, tol: float = ROT_TOL):
        """Raise if R is not a proper rotation to tolerance tol."""
        err = np.abs(self.R.T @ self.R - np.eye(3)).max()
        if err > tol:
            raise ValueError(f"rotation not orthonormal (max dev {err:.3e})")
        if np.linalg.det(self.R) < 0.0:
            raise ValueError("rotation has negative determinant")

    def copy(self) -> "Pose":
        return Pose(self.R.copy(), self.p.copy())


def compose(a: Pose, b: Pose) -> Pose:
    """a then b: returns a @ b in homogeneous form."""
    return Pose(a.R @ b.R, a.R @ b.p + a.p)


def invert(a: Pose) -> Pose:
    Rt = a.R.T
    return Pose(Rt, -(Rt @ a.p))


@dataclass
class Twist:
    """Spatial velocity, linear stacked over angular."""

    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    w: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float).reshape(3)
        self.w = np.asarray(self.w, dtype=float).reshape(3)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.v, self.w])


def rotation_error(R_d: np.ndarray, R_c: np.ndarray) -> np.ndarray:
    """Axis-angle orientation error e_o with R_e = R_d R_c^T, so that
    rotating the current frame by e_o (world axes) aligns it with the
    desired frame.

    e_o = Theta/(2 sin Theta) * vee(R_e - R_e^T); first-order form below
    SMALL_ANGLE, axis extraction within SMALL_ANGLE of pi.
    """
    R_e = R_d @ R_c.T
    tr = np.clip((np.trace(R_e) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(tr)
    w = np.array([R_e[2, 1] - R_e[1, 2],
                  R_e[0, 2] - R_e[2, 0],
                  R_e[1, 0] - R_e[0, 1]])
    if theta < SMALL_ANGLE:
        # R_e ~ I + skew(e_o)
        return 0.5 * w
    if theta > np.pi - SMALL_ANGLE:
        # sin(theta) ~ 0 and vee(R_e - R_e^T) ~ 0: R_e + I has rank 1 with
        # columns parallel to the axis, so read the axis off the largest one
        M = R_e + np.eye(3)
        norms = np.linalg.norm(M, axis=0)
        axis = M[:, int(np.argmax(norms))]
        axis = axis / np.linalg.norm(axis)
        if w @ axis < 0.0:
            axis = -axis
        return theta * axis
    return (theta / (2.0 * np.sin(theta))) * w
