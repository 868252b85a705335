"""Wire message schemas and pose <-> quaternion conversion.

JSON text messages, one per line (raw socket framing) or one per WebSocket
text frame. Quaternions are [x, y, z, w]; positions are meters in the robot
base frame. Rotations exist as quaternions only here at the wire; everything
inside the package works in rotation matrices.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np
from scipy.spatial.transform import Rotation

from ..geometry import Pose

CLIENT_TYPES = ("clutch", "stylus_pose", "set_case", "set_scale", "reset", "tick")
SERVER_TYPES = ("hello", "state", "tick_done", "error")


def quat_from_rotation(R: np.ndarray) -> np.ndarray:
    return Rotation.from_matrix(R).as_quat()


def rotation_from_quat(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if not 0.5 < n < 2.0:
        raise ValueError("quaternion norm far from 1")
    return Rotation.from_quat(q / n).as_matrix()


def pose_to_wire(pose: Pose) -> dict:
    return {"position": [float(x) for x in pose.p],
            "orientation": [float(x) for x in quat_from_rotation(pose.R)]}


def pose_from_wire(d: dict) -> Pose:
    if not isinstance(d, dict):
        raise ValueError("pose must be an object")
    pos = d.get("position")
    ori = d.get("orientation")
    if not (isinstance(pos, list) and len(pos) == 3):
        raise ValueError("pose.position must be a 3-list")
    if not (isinstance(ori, list) and len(ori) == 4):
        raise ValueError("pose.orientation must be a 4-list quaternion")
    p = np.array(pos, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("pose.position must be finite")
    return Pose(rotation_from_quat(ori), p)


def parse_client_message(raw: str | bytes) -> dict:
    """Decode and validate one client message. Raises ValueError on any
    malformed input; the service answers those with an error message and
    keeps the session open."""
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ValueError(f"not valid JSON: {e}") from None
    if not isinstance(msg, dict):
        raise ValueError("message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in CLIENT_TYPES:
        raise ValueError(f"unknown message type {mtype!r}")
    if mtype == "clutch":
        if not isinstance(msg.get("on"), bool):
            raise ValueError("clutch.on must be a boolean")
    elif mtype == "stylus_pose":
        msg["_pose"] = pose_from_wire(msg.get("pose", {}))
    elif mtype == "set_case":
        if msg.get("case") not in (0, 1, 2):
            raise ValueError("set_case.case must be 0, 1 or 2")
    elif mtype == "set_scale":
        s = msg.get("scale")
        if not isinstance(s, (int, float)) or not 0.0 < float(s) <= 10.0:
            raise ValueError("set_scale.scale must lie in (0, 10]")
    elif mtype == "tick":
        n = msg.get("n", 1)
        if not isinstance(n, int) or not 1 <= n <= 1_000_000:
            raise ValueError("tick.n must be an integer in [1, 1e6]")
        msg["n"] = n
    return msg


def state_message(
    t: float,
    q_aug: np.ndarray,
    tip: Pose,
    desired: Pose | None,
    e_p: np.ndarray,
    e_o: np.ndarray,
    rcm_error: float,
    case: int,
    motor_pos: np.ndarray,
    clutched: bool,
) -> dict:
    return {
        "type": "state",
        "time": float(t),
        "q_aug": [float(x) for x in q_aug],
        "tip_pose": pose_to_wire(tip),
        "desired_pose": pose_to_wire(desired) if desired is not None else None,
        "e_p": [float(x) for x in e_p],
        "e_o": [float(x) for x in e_o],
        "rcm_error": float(rcm_error),
        "case": int(case),
        "lambda": float(q_aug[9]),
        "motor_positions": [float(x) for x in motor_pos],
        "clutched": bool(clutched),
    }


def parse_state_message(raw: str | bytes) -> dict:
    """Validate a server state frame (used by tests and scripted clients)."""
    msg = json.loads(raw)
    if msg.get("type") != "state":
        raise ValueError("not a state message")
    if len(msg["q_aug"]) != 10 or len(msg["motor_positions"]) != 4:
        raise ValueError("bad vector lengths in state message")
    pose_from_wire(msg["tip_pose"])
    if msg["desired_pose"] is not None:
        pose_from_wire(msg["desired_pose"])
    return msg


def encode(msg: dict) -> bytes:
    """Canonical line framing for the raw-socket transport."""
    clean = {k: v for k, v in msg.items() if not k.startswith("_")}
    return (json.dumps(clean, separators=(",", ":")) + "\n").encode()
