"""Finite-difference verification battery for every analytic Jacobian.

Central differences with h = 1e-6 against the closed forms, at seeded
random states spanning the workspace (bend range padded off the straight
configuration plus a handful of deliberately near-straight states).
Deviations are reported relative to the larger of the FD matrix's largest
entry and 1, so zero blocks do not inflate ratios.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..continuum import ContinuumConfig, ContinuumParams, actuation_jacobian, \
    instrument_jacobian, tendon_lengths, tip_pose
from ..manipulator import chain_frames
from ..rcm import AugmentedState, assemble, rcm_point_from_poses
from .config import RunConfig
from .simulate import build_model

FD_STEP = 1e-6


def _vee_rate(Ra: np.ndarray, Rb: np.ndarray, R0: np.ndarray, h: float) -> np.ndarray:
    dR = (Ra - Rb) / (2.0 * h) @ R0.T
    return 0.5 * np.array([dR[2, 1] - dR[1, 2], dR[0, 2] - dR[2, 0],
                           dR[1, 0] - dR[0, 1]])


def _rel(dev: float, scale: float) -> float:
    return dev / max(scale, 1.0)


@dataclass
class CheckResult:
    name: str
    max_rel_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_rel_dev < self.tol

    def line(self) -> str:
        tag = "ok" if self.passed else "FAIL"
        return f"{self.name:10s} max rel dev {self.max_rel_dev:.3e}  [{tag}]"


def _random_states(rng: np.random.Generator, n: int, cp: ContinuumParams):
    """States biased to cover the bend range plus near-straight corners."""
    out = []
    for i in range(n):
        q = rng.uniform(-np.pi, np.pi, 7)
        if i % 10 == 0:
            theta = cp.theta0 - rng.uniform(1e-6, 1e-3)
        else:
            theta = rng.uniform(cp.theta_min, cp.theta0 - 1e-3)
        delta = rng.uniform(-np.pi, np.pi)
        lam = rng.uniform(0.05, 0.95)
        out.append(AugmentedState(q, ContinuumConfig(theta, delta), lam))
    return out


def check_jacobians(cfg: RunConfig | None = None, n_samples: int = 1000,
                    seed: int = 7, tol: float = 1e-6) -> list[CheckResult]:
    cfg = cfg or RunConfig()
    kin = build_model(cfg)
    cp = kin.continuum
    rng = np.random.default_rng(seed)
    states = _random_states(rng, n_samples, cp)
    h = FD_STEP
    dev = {k: 0.0 for k in
           ("J_lpsi", "J_ppsi", "J_wpsi", "J_ee", "J_ins", "J_rcm", "J_tip", "J_aug")}

    for st in states:
        psi, q, lam = st.psi, st.q_arm, st.lam

        # tendon map derivative
        Ja = actuation_jacobian(psi, cp)
        Jfd = np.zeros((4, 2))
        for j, (dth, dde) in enumerate(((h, 0.0), (0.0, h))):
            la = tendon_lengths(ContinuumConfig(psi.theta + dth, psi.delta + dde), cp)
            lb = tendon_lengths(ContinuumConfig(psi.theta - dth, psi.delta - dde), cp)
            Jfd[:, j] = (la - lb) / (2.0 * h)
        dev["J_lpsi"] = max(dev["J_lpsi"],
                            _rel(np.abs(Ja - Jfd).max(), np.abs(Jfd).max()))

        # segment twist Jacobian, split position / orientation
        Ji = instrument_jacobian(psi, cp)
        T0 = tip_pose(psi, cp)
        Jfd = np.zeros((6, 2))
        for j, (dth, dde) in enumerate(((h, 0.0), (0.0, h))):
            Ta = tip_pose(ContinuumConfig(psi.theta + dth, psi.delta + dde), cp)
            Tb = tip_pose(ContinuumConfig(psi.theta - dth, psi.delta - dde), cp)
            Jfd[:3, j] = (Ta.p - Tb.p) / (2.0 * h)
            Jfd[3:, j] = _vee_rate(Ta.R, Tb.R, T0.R, h)
        dev["J_ppsi"] = max(dev["J_ppsi"],
                            _rel(np.abs(Ji[:3] - Jfd[:3]).max(), np.abs(Jfd[:3]).max()))
        dev["J_wpsi"] = max(dev["J_wpsi"],
                            _rel(np.abs(Ji[3:] - Jfd[3:]).max(), np.abs(Jfd[3:]).max()))

        # arm Jacobians at both target points
        frames = chain_frames(q, kin.dh)
        b = assemble(st, kin)
        for name, J, point_of in (
            ("J_ee", b.j_ee, lambda fr: fr[-1].p),
            ("J_ins", b.j_ins, lambda fr: (fr[-1].R @ kin.tool.p + fr[-1].p)),
        ):
            Jfd = np.zeros((6, 7))
            for j in range(7):
                dq = np.zeros(7)
                dq[j] = h
                fa = chain_frames(q + dq, kin.dh)
                fb = chain_frames(q - dq, kin.dh)
                Jfd[:3, j] = (point_of(fa) - point_of(fb)) / (2.0 * h)
                Jfd[3:, j] = _vee_rate(fa[-1].R, fb[-1].R, frames[-1].R, h)
            dev[name] = max(dev[name], _rel(np.abs(J - Jfd).max(), np.abs(Jfd).max()))

        # full augmented stack across all 10 coordinates
        v0 = st.vector()
        Jfd = np.zeros((9, 10))
        for j in range(10):
            dvec = np.zeros(10)
            dvec[j] = h
            A = assemble(AugmentedState.from_vector(v0 + dvec), kin)
            B = assemble(AugmentedState.from_vector(v0 - dvec), kin)
            Jfd[:3, j] = (A.tip_pose.p - B.tip_pose.p) / (2.0 * h)
            Jfd[3:6, j] = _vee_rate(A.tip_pose.R, B.tip_pose.R, b.tip_pose.R, h)
            pa = rcm_point_from_poses(A.ee_pose.p, A.ins_pose.p, v0[9] + dvec[9])
            pb = rcm_point_from_poses(B.ee_pose.p, B.ins_pose.p, v0[9] - dvec[9])
            Jfd[6:, j] = (pa - pb) / (2.0 * h)
        dev["J_tip"] = max(dev["J_tip"],
                           _rel(np.abs(b.j_aug[:6] - Jfd[:6]).max(), np.abs(Jfd[:6]).max()))
        dev["J_rcm"] = max(dev["J_rcm"],
                           _rel(np.abs(b.j_rcm - Jfd[6:]).max(), np.abs(Jfd[6:]).max()))
        dev["J_aug"] = max(dev["J_aug"],
                           _rel(np.abs(b.j_aug - Jfd).max(), np.abs(Jfd).max()))

    return [CheckResult(k, v, tol) for k, v in dev.items()]


def run_checks(cfg: RunConfig | None = None, n_samples: int = 1000,
               seed: int = 7) -> tuple[list[CheckResult], float]:
    t0 = time.time()
    results = check_jacobians(cfg, n_samples, seed)
    return results, time.time() - t0
