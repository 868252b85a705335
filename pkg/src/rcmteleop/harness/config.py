"""Run configuration: one nested dataclass tree, JSON round-trippable, with
dotted-path overrides so any leaf can be set from the command line.

The frozen default arm posture keeps the instrument shaft vertical (the
elbow-bent q2 + q4 + q6 = 0 family keeps the flange parallel to home while
staying far from the stretched-out singularity; smallest augmented singular
value ~0.05 there, against 0 at home).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any

import numpy as np

from ..actuation import ActuationParams
from ..continuum import ContinuumParams
from ..controller import RateParams
from ..manipulator import DHRow, DEFAULT_DH
from ..rcm import LAMBDA_BOUNDS
from ..solver import SolverConfig
from .trajectories import TrajectoryConfig

DEFAULT_Q_ARM = (0.0, 0.3, 0.0, -1.2, 0.0, 0.9, 0.0)


@dataclass
class ModelConfig:
    dh: list[list[float]] = field(
        default_factory=lambda: [[r.theta_offset, r.d, r.alpha, r.a] for r in DEFAULT_DH])
    tool_xyz: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.230])
    L: float = 0.030
    r: float = 0.0018
    theta_min: float = np.pi / 18.0
    R_pulley: float = 0.0054

    def dh_rows(self) -> tuple[DHRow, ...]:
        return tuple(DHRow(*row) for row in self.dh)

    def continuum(self) -> ContinuumParams:
        return ContinuumParams(L=self.L, r=self.r, theta_min=self.theta_min)

    def actuation(self) -> ActuationParams:
        return ActuationParams(R_pulley=self.R_pulley)


@dataclass
class InitialState:
    q_arm: list[float] = field(default_factory=lambda: list(DEFAULT_Q_ARM))
    theta: float = np.pi / 2.0 * 0.995
    delta: float = 0.0
    lam: float = -1.0   # < 0 means "use solver.lam0"


@dataclass
class ControlConfig:
    case: int = 0
    dt: float = 1e-3
    arm_locked: bool = False
    lam_lo: float = LAMBDA_BOUNDS[0]
    lam_hi: float = LAMBDA_BOUNDS[1]


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    broadcast_hz: float = 60.0
    realtime: bool = True       # False: advance only on tick messages
    motion_scale: float = 0.5
    static_dir: str = ""        # optional directory served over plain HTTP


@dataclass
class SolverSection:
    tau: float = 1e-8
    alpha: float = 4.0
    lam0: float = 0.4
    damping: float = 0.0

    def build(self) -> SolverConfig:
        return SolverConfig(self.tau, self.alpha, self.lam0, self.damping)


@dataclass
class RateSection:
    v_mx: float = 0.020
    v_mn: float = 0.001
    w_mx: float = 0.5
    w_mn: float = 0.02
    gamma_p: float = 0.001
    gamma_o: float = 0.01
    eps_p: float = 5.0
    eps_o: float = 5.0

    def build(self) -> RateParams:
        return RateParams(self.v_mx, self.v_mn, self.w_mx, self.w_mn,
                          self.gamma_p, self.gamma_o, self.eps_p, self.eps_o)


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    initial: InitialState = field(default_factory=InitialState)
    control: ControlConfig = field(default_factory=ControlConfig)
    solver: SolverSection = field(default_factory=SolverSection)
    rate: RateSection = field(default_factory=RateSection)
    trajectory: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    output: str = ""            # CSV path; empty = keep in memory only

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @staticmethod
    def from_dict(d: dict) -> "RunConfig":
        return _build(RunConfig, d)

    @staticmethod
    def load(path: str) -> "RunConfig":
        with open(path) as f:
            return RunConfig.from_dict(json.load(f))


_NESTED = {
    "model": ModelConfig,
    "initial": InitialState,
    "control": ControlConfig,
    "solver": SolverSection,
    "rate": RateSection,
    "trajectory": TrajectoryConfig,
    "service": ServiceConfig,
}


def _build(cls, d: dict):
    """Construct a dataclass tree from a plain dict, complaining about
    unknown keys instead of dropping them."""
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise KeyError(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    kwargs = {}
    for name, val in d.items():
        sub = _NESTED.get(name) if cls is RunConfig else None
        kwargs[name] = _build(sub, val) if (sub and isinstance(val, dict)) else val
    return cls(**kwargs)


def flatten(d: dict, prefix: str = "") -> dict[str, Any]:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        else:
            out[key] = v
    return out


def set_by_path(d: dict, path: str, value: Any):
    parts = path.split(".")
    cur = d
    for p in parts[:-1]:
        if p not in cur or not isinstance(cur[p], dict):
            raise KeyError(f"no such config section: {path}")
        cur = cur[p]
    if parts[-1] not in cur:
        raise KeyError(f"no such config key: {path}")
    cur[parts[-1]] = value


def parse_override(raw_value: str, template: Any) -> Any:
    """Parse a CLI string against the type of the default value."""
    if isinstance(template, bool):
        if raw_value.lower() in ("1", "true", "yes", "on"):
            return True
        if raw_value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw_value!r}")
    if isinstance(template, int) and not isinstance(template, bool):
        return int(raw_value)
    if isinstance(template, float):
        return float(raw_value)
    if isinstance(template, list):
        return json.loads(raw_value)
    return raw_value
