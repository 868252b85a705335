"""Command line entry points.

Every leaf of the run configuration is exposed as a dotted flag generated
from the defaults, e.g. --solver.alpha 2.0 or --trajectory.kind square, on
top of an optional --config JSON file (flags win over the file).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..metrics import case_comparison, format_comparison
from .checks import run_checks
from .config import RunConfig, flatten, parse_override, set_by_path
from .simulate import build_initial_state, build_model, run_simulation
from .trajectories import generate
from ..rcm import assemble


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="FILE", default=None,
                        help="JSON run configuration")
    flat = flatten(RunConfig().to_dict())
    for key, val in sorted(flat.items()):
        parser.add_argument(f"--{key}", metavar="V", default=None,
                            dest=key, help=f"override (default {val!r})")


def _load_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.load(args.config) if args.config else RunConfig()
    d = base.to_dict()
    template = flatten(RunConfig().to_dict())
    for key, tmpl in template.items():
        raw = getattr(args, key, None)
        if raw is not None:
            set_by_path(d, key, parse_override(raw, tmpl))
    return RunConfig.from_dict(d)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    log = run_simulation(cfg)
    print(json.dumps(log.summary, indent=2, sort_keys=True))
    if cfg.output:
        print(f"log written to {cfg.output}", file=sys.stderr)
    return 1 if log.summary.get("aborted") else 0


def cmd_check_jacobians(args) -> int:
    cfg = _load_config(args)
    results, elapsed = run_checks(cfg, n_samples=args.samples, seed=args.seed)
    for r in results:
        print(r.line())
    print(f"{len(results)} checks on {args.samples} states in {elapsed:.1f}s")
    return 0 if all(r.passed for r in results) else 1


def cmd_metrics(args) -> int:
    per_case = {}
    for path in args.logs:
        with open(path + ".summary.json") as f:
            case = json.load(f)["case"]
        data = np.genfromtxt(path, delimiter=",", names=True)
        per_case[int(case)] = {
            "sig_lin": np.stack([data["sigL1"], data["sigL2"], data["sigL3"]], axis=1),
            "sig_ang": np.stack([data["sigA1"], data["sigA2"], data["sigA3"]], axis=1),
            "e_p": data["ep"],
            "e_o": data["eo"],
        }
    report = case_comparison(per_case)
    print(format_comparison(report))
    if args.out:
        with open(args.out, "w") as f:
            json.dump(report, f, indent=2, sort_keys=True)
            f.write("\n")
    return 0


def cmd_serve(args) -> int:
    from .service import serve  # deferred: asyncio only needed here
    cfg = _load_config(args)
    try:
        serve(cfg)
    except KeyboardInterrupt:
        pass
    return 0


def cmd_gen_trajectory(args) -> int:
    from .protocol import pose_to_wire
    cfg = _load_config(args)
    kin = build_model(cfg)
    state = build_initial_state(cfg)
    start = assemble(state, kin).tip_pose
    for wp in generate(cfg.trajectory, start, kin=kin, state0=state):
        rec = {"t": wp.t,
               "pose": pose_to_wire(wp.pose) if wp.pose is not None else None}
        if wp.psi_cmd is not None:
            rec["psi_cmd"] = list(wp.psi_cmd)
        print(json.dumps(rec))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rcmteleop",
        description="RCM-constrained continuum teleoperation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one closed-loop simulation")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("check-jacobians",
                       help="finite-difference verification of all Jacobians")
    _add_config_flags(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(fn=cmd_check_jacobians)

    p = sub.add_parser("metrics", help="dexterity report over one or more run logs")
    p.add_argument("logs", nargs="+", help="CSV logs from simulate")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("serve", help="run the live teleoperation service")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("gen-trajectory", help="print the waypoint sequence")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_gen_trajectory)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
