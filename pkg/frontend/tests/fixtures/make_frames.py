"""Regenerate frames.ndjson: a fixed set of wire frames for the client
round-trip test. Run from the repository root:

    python3 frontend/tests/fixtures/make_frames.py
"""

import json
from pathlib import Path

import numpy as np

from rcmteleop.continuum import ContinuumConfig
from rcmteleop.harness.config import RunConfig
from rcmteleop.harness.protocol import encode, state_message
from rcmteleop.harness.service import TeleopService
from rcmteleop.rcm import AugmentedState, assemble


def main():
    rng = np.random.default_rng(42)
    cfg = RunConfig()
    svc = TeleopService(cfg)
    lines = [encode(svc.hello()).decode().rstrip("\n")]

    kin = svc.kin
    cp = kin.continuum
    for i in range(47):
        st = AugmentedState(
            rng.uniform(-1.2, 1.2, 7),
            ContinuumConfig(rng.uniform(cp.theta_min + 0.05, cp.theta0 - 0.02),
                            rng.uniform(-np.pi, np.pi)),
            rng.uniform(0.15, 0.85))
        b = assemble(st, kin)
        desired = None if i % 7 == 0 else b.tip_pose
        msg = state_message(
            t=i * 1e-3,
            q_aug=st.vector(),
            tip=b.tip_pose,
            desired=desired,
            e_p=rng.normal(size=3) * 1e-3,
            e_o=rng.normal(size=3) * 1e-2,
            rcm_error=float(abs(rng.normal()) * 1e-6),
            case=int(rng.integers(3)),
            motor_pos=rng.normal(size=4) * 0.1,
            clutched=bool(i % 2),
        )
        lines.append(encode(msg).decode().rstrip("\n"))

    lines.append(encode({"type": "tick_done", "time": 0.25, "ticks": 250}).decode().rstrip("\n"))
    lines.append(encode({"type": "error", "message": "clutch requires a stylus_pose first"}).decode().rstrip("\n"))

    out = Path(__file__).parent / "frames.ndjson"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} frames to {out}")


if __name__ == "__main__":
    main()
