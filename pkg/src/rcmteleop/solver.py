"""Redundancy resolution: truncated pseudoinverse and task-priority recursion.

Three wirings of the same machinery:

  case 0: single stacked task (tip twist + RCM) solved least-squares
  case 1: RCM > tip linear > tip angular
  case 2: RCM > tip angular > tip linear

plus a null-space objective that regulates lam toward a setpoint without
disturbing any task.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from .geometry import Twist
from .rcm import JacobianBundle

N_DOF = 10

# absolute singular value floor for pinv_truncated; SI-unit Jacobians here
# never carry meaningful directions this weak, roundoff never exceeds it
SIGMA_FLOOR = 1e-12


class PriorityCase(IntEnum):
    STACKED = 0
    RCM_LINEAR_ANGULAR = 1
    RCM_ANGULAR_LINEAR = 2


@dataclass(frozen=True)
class SolverConfig:
    """tau: relative singular value cutoff for the truncated pseudoinverse.
    alpha: null-space gain on the lam setpoint objective.
    damping: optional Tikhonov factor applied to retained singular values.
    """

    tau: float = 1e-8
    alpha: float = 4.0
    lam0: float = 0.4
    damping: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.tau <= 1e-2:
            raise ValueError("tau must lie in (0, 1e-2]")
        if self.alpha < 0.0 or self.damping < 0.0:
            raise ValueError("alpha and damping must be nonnegative")
        if not 0.0 < self.lam0 < 1.0:
            raise ValueError("lam0 must lie in (0, 1)")


def pinv_truncated(J: np.ndarray, tau: float = 1e-8, damping: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values below tau * s_max
    treated as exactly zero. With damping > 0 the retained values are
    inverted as s / (s^2 + damping^2).

    An absolute floor backs up the relative cutoff: a task block that a
    higher-priority projector has annihilated is zero only up to roundoff
    (entries around 1e-16), and inverting that noise produces rates around
    1e+16. Physical singular values in this system sit far above the floor,
    annihilation residue far below it."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    if s.size == 0 or s[0] <= SIGMA_FLOOR:
        return np.zeros((J.shape[1], J.shape[0]))
    keep = s > np.maximum(tau * s[0], SIGMA_FLOOR)
    s_kept = s[keep]
    if damping > 0.0:
        inv = s_kept / (s_kept * s_kept + damping * damping)
    else:
        inv = 1.0 / s_kept
    return (Vt[keep].T * inv) @ U[:, keep].T


@dataclass
class Task:
    """One priority level: jacobian (m x n) and desired rate (m,)."""

    jacobian: np.ndarray
    rate: np.ndarray


def solve_hierarchy(
    tasks: Sequence[Task],
    eta: np.ndarray | None = None,
    tau: float = 1e-8,
    damping: float = 0.0,
) -> np.ndarray:
    """Strict task-priority recursion.

    qdot_k = qdot_{k-1} + pinv(J_k P_{k-1}) (rate_k - J_k qdot_{k-1})
    P_k    = P_{k-1} - pinv(J_k P_{k-1}) (J_k P_{k-1})

    Lower levels move only inside the null space of every level above; eta
    is projected through the final P_K.
    """
    if not tasks:
        raise ValueError("at least one task required")
    n = tasks[0].jacobian.shape[1]
    qdot = np.zeros(n)
    P = np.eye(n)
    for t in tasks:
        JP = t.jacobian @ P
        JP_pinv = pinv_truncated(JP, tau, damping)
        qdot = qdot + JP_pinv @ (np.asarray(t.rate, dtype=float) - t.jacobian @ qdot)
        P = P - JP_pinv @ JP
    if eta is not None:
        qdot = qdot + P @ np.asarray(eta, dtype=float)
    return qdot


def nullspace_objective(lam: float, cfg: SolverConfig) -> np.ndarray:
    """Gradient-descent step on g = 1/2 (lam - lam0)^2, lifted to R^10.
    Only the lam coordinate is driven; the projector keeps it from
    disturbing the tasks."""
    eta = np.zeros(N_DOF)
    eta[9] = -cfg.alpha * (lam - cfg.lam0)
    return eta


def _tasks_for_case(
    case: PriorityCase,
    bundle: JacobianBundle,
    tip: Twist,
    rcm_rate: np.ndarray,
) -> list[Task]:
    t_rcm = Task(bundle.j_rcm, rcm_rate)
    t_lin = Task(bundle.j_lin, tip.v)
    t_ang = Task(bundle.j_ang, tip.w)
    if case == PriorityCase.STACKED:
        stacked = np.concatenate([tip.stacked(), rcm_rate])
        return [Task(bundle.j_aug, stacked)]
    if case == PriorityCase.RCM_LINEAR_ANGULAR:
        return [t_rcm, t_lin, t_ang]
    if case == PriorityCase.RCM_ANGULAR_LINEAR:
        return [t_rcm, t_ang, t_lin]
    raise ValueError(f"unknown priority case {case!r}")


def solve(
    case: PriorityCase,
    bundle: JacobianBundle,
    tip: Twist,
    cfg: SolverConfig,
    rcm_rate: np.ndarray | None = None,
) -> np.ndarray:
    """q_aug rate for the requested priority arrangement. The RCM rate is
    zero in normal operation (the trocar does not move)."""
    if rcm_rate is None:
        rcm_rate = np.zeros(3)
    tasks = _tasks_for_case(PriorityCase(case), bundle, tip, rcm_rate)
    eta = nullspace_objective(bundle.lam, cfg)
    return solve_hierarchy(tasks, eta, cfg.tau, cfg.damping)


def solve_idle(bundle: JacobianBundle, cfg: SolverConfig,
               rcm_rate: np.ndarray | None = None) -> np.ndarray:
    """No active command: only the RCM constraint stays up, and the lam
    setpoint objective acts through its (much larger) null space.

    The full stack cannot do this: tip pose plus trocar point pin the
    shaft, leaving only the arm's elbow self motion in the null space,
    which has no lam component at all. Recentering lam is only possible
    while the tip tasks are quiet.
    """
    if rcm_rate is None:
        rcm_rate = np.zeros(3)
    tasks = [Task(bundle.j_rcm, np.asarray(rcm_rate, dtype=float))]
    return solve_hierarchy(tasks, nullspace_objective(bundle.lam, cfg),
                           cfg.tau, cfg.damping)


def solve_segment_only(
    bundle: JacobianBundle,
    tip: Twist,
    cfg: SolverConfig,
    case: PriorityCase = PriorityCase.STACKED,
) -> np.ndarray:
    """Arm-locked variant: only the psi columns may move. Used when the
    operator pins the arm and steers the wrist alone; lam is frozen too
    since the shaft cannot translate.

    The priority arrangement still applies, restricted to the two segment
    coordinates. The RCM level survives the restriction as a zero block
    (the trocar point does not feel psi), so its projector is the
    identity and the tip tasks fight over the segment alone."""
    tasks = _tasks_for_case(PriorityCase(case), bundle, tip, np.zeros(3))
    restricted = [Task(t.jacobian[:, 7:9], t.rate) for t in tasks]
    qdot = np.zeros(N_DOF)
    qdot[7:9] = solve_hierarchy(restricted, None, cfg.tau, cfg.damping)
    return qdot
