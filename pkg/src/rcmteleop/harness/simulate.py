"""Deterministic closed-loop simulation runs with CSV logging.

One run: build the model and initial state from a RunConfig, place the
trocar at the initial state's shaft crossing, generate the reference
trajectory, then tick the controller at fixed dt with zero-order-hold
targets. Every tick is logged; float formatting is fixed at %.17g so two
runs of the same config write byte-identical files.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..actuation import motor_positions, motor_velocities
from ..continuum import ContinuumConfig
from ..controller import step
from ..geometry import Pose
from ..metrics import svd_metrics
from ..rcm import AugmentedState, KinematicModel, assemble
from ..solver import PriorityCase
from .config import RunConfig
from .protocol import quat_from_rotation
from .trajectories import Waypoint, generate

FLOAT_FMT = "%.17g"


def build_model(cfg: RunConfig) -> KinematicModel:
    return KinematicModel(
        dh=cfg.model.dh_rows(),
        tool=Pose(np.eye(3), np.array(cfg.model.tool_xyz, dtype=float)),
        continuum=cfg.model.continuum())


def build_initial_state(cfg: RunConfig) -> AugmentedState:
    lam = cfg.initial.lam if cfg.initial.lam > 0.0 else cfg.solver.lam0
    return AugmentedState(
        np.array(cfg.initial.q_arm, dtype=float),
        ContinuumConfig(cfg.initial.theta, cfg.initial.delta),
        float(lam))


_COLS = (
    ["time"]
    + [f"q{i}" for i in range(7)] + ["theta", "delta", "lam"]
    + ["tip_x", "tip_y", "tip_z", "tip_qx", "tip_qy", "tip_qz", "tip_qw"]
    + ["des_x", "des_y", "des_z", "des_qx", "des_qy", "des_qz", "des_qw"]
    + ["ep", "eo", "rcm_err"]
    + ["v_x", "v_y", "v_z", "w_x", "w_y", "w_z"]
    + [f"qd{i}" for i in range(10)]
    + ["sigL1", "sigL2", "sigL3", "sigA1", "sigA2", "sigA3"]
    + [f"mot{i}" for i in range(1, 5)] + [f"motv{i}" for i in range(1, 5)]
    + ["cmd_theta", "cmd_delta"]
    + ["idle", "fault", "theta_clamped", "lam_clamped"]
)


@dataclass
class RunLog:
    columns: dict[str, np.ndarray]
    summary: dict
    config: RunConfig

    def write_csv(self, path: str):
        cols = [self.columns[c] for c in _COLS]
        n = len(cols[0])
        with open(path, "w") as f:
            f.write(",".join(_COLS) + "\n")
            for i in range(n):
                f.write(",".join(FLOAT_FMT % c[i] for c in cols) + "\n")

    def write_summary(self, path: str):
        with open(path, "w") as f:
            json.dump(self.summary, f, indent=2, sort_keys=True)
            f.write("\n")


def run_simulation(cfg: RunConfig) -> RunLog:
    kin = build_model(cfg)
    act = cfg.model.actuation()
    state = build_initial_state(cfg)
    solver_cfg = cfg.solver.build()
    rate = cfg.rate.build()
    case = PriorityCase(cfg.control.case)
    dt = cfg.control.dt
    lam_bounds = (cfg.control.lam_lo, cfg.control.lam_hi)

    b0 = assemble(state, kin)
    trocar = b0.p_rcm
    waypoints = generate(cfg.trajectory, b0.tip_pose, kin=kin, state0=state)

    n_ticks = int(round(cfg.trajectory.duration / dt))
    rows = {c: np.empty(n_ticks) for c in _COLS}

    wall0 = time.time()
    k = 0
    aborted = False
    done = 0
    for i in range(n_ticks):
        t = i * dt
        while k < len(waypoints) - 1 and waypoints[k + 1].t <= t:
            k += 1
        wp: Waypoint = waypoints[k]
        state, tick = step(state, wp.pose, case, kin, solver_cfg, rate, dt,
                           arm_locked=cfg.control.arm_locked,
                           lam_bounds=lam_bounds, trocar=trocar)
        _log_row(rows, i, t, state, tick, wp, trocar, kin, act)
        done = i + 1
        if tick.fault:
            aborted = True
            break
    wall = time.time() - wall0
    if done < n_ticks:
        rows = {c: v[:done] for c, v in rows.items()}

    summary = _summarize(rows, cfg, wall, done)
    summary["aborted"] = aborted
    log = RunLog(rows, summary, cfg)
    if cfg.output:
        log.write_csv(cfg.output)
        log.write_summary(cfg.output + ".summary.json")
    return log


def _log_row(rows, i, t, state, tick, wp, trocar, kin, act):
    b = tick.bundle
    r = rows
    r["time"][i] = t
    for j in range(7):
        r[f"q{j}"][i] = state.q_arm[j]
    r["theta"][i] = state.psi.theta
    r["delta"][i] = state.psi.delta
    r["lam"][i] = state.lam
    tq = quat_from_rotation(b.tip_pose.R)
    for name, val in zip(("tip_x", "tip_y", "tip_z"), b.tip_pose.p):
        r[name][i] = val
    for name, val in zip(("tip_qx", "tip_qy", "tip_qz", "tip_qw"), tq):
        r[name][i] = val
    if wp.pose is not None:
        dq = quat_from_rotation(wp.pose.R)
        for name, val in zip(("des_x", "des_y", "des_z"), wp.pose.p):
            r[name][i] = val
        for name, val in zip(("des_qx", "des_qy", "des_qz", "des_qw"), dq):
            r[name][i] = val
    else:
        for name in ("des_x", "des_y", "des_z", "des_qx", "des_qy", "des_qz",
                     "des_qw"):
            r[name][i] = np.nan
    r["ep"][i] = np.linalg.norm(tick.e_p)
    r["eo"][i] = np.linalg.norm(tick.e_o)
    r["rcm_err"][i] = np.linalg.norm(b.p_rcm - trocar)
    for name, val in zip(("v_x", "v_y", "v_z"), tick.twist.v):
        r[name][i] = val
    for name, val in zip(("w_x", "w_y", "w_z"), tick.twist.w):
        r[name][i] = val
    for j in range(10):
        r[f"qd{j}"][i] = tick.qdot[j]
    sl = svd_metrics(b.j_lin).sigmas
    sa = svd_metrics(b.j_ang).sigmas
    for name, val in zip(("sigL1", "sigL2", "sigL3"), sl):
        r[name][i] = val
    for name, val in zip(("sigA1", "sigA2", "sigA3"), sa):
        r[name][i] = val
    mot = motor_positions(state.psi, kin.continuum, act)
    motv = motor_velocities(state.psi, tick.qdot[7:9], kin.continuum, act)
    for j in range(4):
        r[f"mot{j + 1}"][i] = mot[j]
        r[f"motv{j + 1}"][i] = motv[j]
    if wp.psi_cmd is not None:
        r["cmd_theta"][i], r["cmd_delta"][i] = wp.psi_cmd
    else:
        r["cmd_theta"][i] = np.nan
        r["cmd_delta"][i] = np.nan
    r["idle"][i] = float(tick.idle)
    r["fault"][i] = float(tick.fault)
    r["theta_clamped"][i] = float(tick.theta_clamped)
    r["lam_clamped"][i] = float(tick.lam_clamped)


def _summarize(rows, cfg: RunConfig, wall: float, n_ticks: int) -> dict:
    ep, eo = rows["ep"], rows["eo"]
    kinv_lin = np.where(rows["sigL1"] > 0, rows["sigL3"] / rows["sigL1"], 0.0)
    kinv_ang = np.where(rows["sigA1"] > 0, rows["sigA3"] / rows["sigA1"], 0.0)
    out = {
        "ticks": n_ticks,
        "wall_s": wall,
        "dt": cfg.control.dt,
        "case": cfg.control.case,
        "kind": cfg.trajectory.kind,
        "max_ep": float(ep.max()),
        "rmse_ep": float(np.sqrt(np.mean(ep ** 2))),
        "mean_ep": float(ep.mean()),
        "max_eo": float(eo.max()),
        "rmse_eo": float(np.sqrt(np.mean(eo ** 2))),
        "mean_eo": float(eo.mean()),
        "max_rcm_err": float(rows["rcm_err"].max()),
        "final_lam": float(rows["lam"][-1]),
        "mean_m_lin": float(np.mean(rows["sigL1"] * rows["sigL2"] * rows["sigL3"])),
        "mean_m_ang": float(np.mean(rows["sigA1"] * rows["sigA2"] * rows["sigA3"])),
        "mean_kinv_lin": float(kinv_lin.mean()),
        "mean_kinv_ang": float(kinv_ang.mean()),
        "faults": int(rows["fault"].sum()),
        "theta_clamps": int(rows["theta_clamped"].sum()),
        "lam_clamps": int(rows["lam_clamped"].sum()),
    }
    if not np.isnan(rows["cmd_theta"]).all():
        th_err = np.abs(rows["cmd_theta"] - rows["theta"])
        de_err = np.abs(rows["cmd_delta"] - rows["delta"])
        out["max_theta_err_deg"] = float(np.degrees(th_err.max()))
        out["max_delta_err_deg"] = float(np.degrees(de_err.max()))
    return out
