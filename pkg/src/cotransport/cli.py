"""Command-line entry points: run scenarios, verify oracle suites, host the
interactive service, and compare run logs.

Exit codes: 0 success, 1 invariant/suite failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .config import ConfigError, load_scenario, parse_override_arg, resolve_scenario


def _cmd_run(args) -> int:
    try:
        scenario_path = resolve_scenario(args.scenario)
        overrides = dict(parse_override_arg(item) for item in args.set or [])
        cfg = load_scenario(scenario_path, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    from .scenario import run_scenario

    out = Path(args.out) if args.out else None
    run = run_scenario(cfg, log_path=out, seed=args.seed)
    summary = run.summary.as_dict()
    summary["ok"] = run.summary.invariants_ok
    # strict JSON: no Infinity literals (min_distance is inf with no obstacles)
    summary = {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
               for k, v in summary.items()}
    print(json.dumps(summary))
    return 0 if run.summary.invariants_ok else 1


def _cmd_compare(args) -> int:
    from .logs import compare, read_log

    try:
        data_a = read_log(args.log_a)
        data_b = read_log(args.log_b)
        print(compare(data_a, data_b, d_min_reference=args.d_min))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_verify(args) -> int:
    from . import verify
    from .config import load_robot
    from importlib import resources

    robot_path = resources.files("cotransport") / "data" / "robots" / "diffdrive_6dof.yaml"
    robot = load_robot(str(robot_path))

    suites = {
        "kinematics": lambda: verify.kinematics_suite(robot.arm, robot.base),
        "qp": lambda: verify.qp_suite(),
        "passivity": lambda: verify.passivity_suite(),
        "barriers": lambda: verify.barrier_gradient_suite(robot.arm, robot.base,
                                                          robot.load_capsule),
    }
    wanted = list(suites) if args.suite == "all" else [args.suite]
    failed = 0
    for name in wanted:
        checks, failures = suites[name]()
        status = "ok" if not failures else "FAIL"
        print(f"{name}: {checks} checks, {len(failures)} failures [{status}]")
        for line in failures[:20]:
            print(f"  {line}")
        failed += len(failures)
    return 0 if failed == 0 else 1


def _cmd_serve(args) -> int:
    try:
        scenario_path = resolve_scenario(args.scenario)
        cfg = load_scenario(scenario_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    import asyncio

    from .service import serve

    try:
        asyncio.run(serve(cfg, host=args.host, port=args.port, frame_rate=args.rate))
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotransport",
        description="Passive whole-body admittance control: scenarios, verification, live sessions.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scripted scenario to a CSV log")
    run_p.add_argument("scenario", help="scenario name or path to a scenario file")
    run_p.add_argument("--out", help="log output path (default from the scenario)")
    run_p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path config override (repeatable)")
    run_p.add_argument("--seed", type=int, help="noise seed override")
    run_p.set_defaults(fn=_cmd_run)

    cmp_p = sub.add_parser("compare", help="compare two run logs")
    cmp_p.add_argument("log_a")
    cmp_p.add_argument("log_b")
    cmp_p.add_argument("--d-min", type=float, default=0.3,
                       help="safety distance used to report min d from h values")
    cmp_p.set_defaults(fn=_cmd_compare)

    ver_p = sub.add_parser("verify", help="run an oracle-backed property suite")
    ver_p.add_argument("--suite", default="all",
                       choices=["kinematics", "qp", "passivity", "barriers", "all"])
    ver_p.set_defaults(fn=_cmd_verify)

    srv_p = sub.add_parser("serve", help="host an interactive session over WebSocket")
    srv_p.add_argument("--scenario", default="transport_stop_go")
    srv_p.add_argument("--host", default="127.0.0.1")
    srv_p.add_argument("--port", type=int, default=8765)
    srv_p.add_argument("--rate", type=float, default=60.0, help="frame broadcast rate (Hz)")
    srv_p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
