"""Tendon actuation: segment configuration rates to motor commands.

Each tendon is wound on a pulley of radius R_pulley; motor angle times
pulley radius equals tendon displacement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .continuum import ContinuumConfig, ContinuumParams, actuation_jacobian, \
    tendon_lengths


@dataclass(frozen=True)
class ActuationParams:
    R_pulley: float = 0.0054  # meters

    def __post_init__(self):
        if self.R_pulley <= 0.0:
            raise ValueError("pulley radius must be positive")


def motor_velocities(
    cfg: ContinuumConfig,
    psi_dot: np.ndarray,
    cont: ContinuumParams,
    act: ActuationParams,
) -> np.ndarray:
    """theta_m_dot = J_lpsi psi_dot / R_pulley, one entry per tendon."""
    return (actuation_jacobian(cfg, cont) @ np.asarray(psi_dot, dtype=float)) / act.R_pulley


def motor_positions(
    cfg: ContinuumConfig,
    cont: ContinuumParams,
    act: ActuationParams,
) -> np.ndarray:
    """Absolute motor angles that realize the configuration: l_i / R_pulley."""
    return tendon_lengths(cfg, cont) / act.R_pulley
