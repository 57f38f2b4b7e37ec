"""Acceptance suite: one test per criterion, each printing a PASS line with
the measured figure when its assertions hold.

The interactive cockpit round-trip criterion lives with the frontend package
(frontend/tests), which drives the WebSocket service directly.
"""
import json
import time

import numpy as np
import pytest

from cotransport.cli import main as cli_main
from cotransport.config import load_scenario
from cotransport.kinematics import (
    arm_tool_jacobian_in_base,
    augmented_jacobian,
    base_jacobian_sfl,
    control_frame_pose,
    h_mapping,
    whole_body_snapshot,
)
from cotransport.scenario import run_scenario
from cotransport.verify import kinematics_suite, nonholonomy_suite, qp_suite

from conftest import SCENARIO_DIR


def report(line):
    print(f"\n[acceptance] {line}")


def test_criterion_1_kinematics_oracle_suite(robot):
    t0 = time.perf_counter()
    checks, failures = kinematics_suite(robot.arm, robot.base, n_configs=100, tol=1e-6)
    elapsed = time.perf_counter() - t0
    assert failures == [], failures[:5]
    assert elapsed < 5.0, f"suite took {elapsed:.1f} s"
    report(f"criterion 1 PASS: {checks} finite-difference checks < 1e-6 in {elapsed:.1f} s")


def test_criterion_2_nonholonomy(robot):
    checks, failures = nonholonomy_suite(robot.base, n_headings=360)
    assert failures == [], failures[:5]
    report(f"criterion 2 PASS: translational ranks and exact determinant at 360 headings")


def test_criterion_3_passivity_ledger(shipped_runs):
    cfg, run, elapsed = shipped_runs["tank_drain"]
    s = run.summary
    assert s.ticks == 12000  # 60 s at 5 ms
    assert s.tank_floor_ok, f"tank dipped to {s.min_tank} J"
    assert s.min_tank >= cfg.tank.floor - 1e-12
    assert s.ledger_ok, f"ledger margin {s.ledger_margin}"
    assert elapsed < 10.0, f"run took {elapsed:.1f} s"
    report(f"criterion 3 PASS: min T = {s.min_tank:.3f} J >= 0.1, "
           f"ledger margin {s.ledger_margin:+.3e} J, {elapsed:.1f} s")


def test_criterion_4_qp_oracle():
    t0 = time.perf_counter()
    checks, failures = qp_suite(n_instances=1000, tol=1e-6, kkt_tol=1e-8)
    elapsed = time.perf_counter() - t0
    assert checks == 1000
    assert failures == [], failures[:5]
    assert elapsed < 30.0, f"suite took {elapsed:.1f} s"
    report(f"criterion 4 PASS: 1000 instances agree with the oracle in {elapsed:.1f} s")


def test_criterion_5_variable_vs_fixed_admittance(shipped_runs, tmp_path):
    _, run_on, _ = shipped_runs["transport_stop_go"]
    cfg_off = load_scenario(SCENARIO_DIR / "transport_stop_go.yaml",
                            overrides={"admittance.adaptation": "false"})
    run_off = run_scenario(cfg_off, log_path=tmp_path / "transport_off.csv")
    mean_on = run_on.summary.mean_force
    mean_off = run_off.summary.mean_force
    assert mean_on < mean_off, f"adaptation ON {mean_on:.3f} !< OFF {mean_off:.3f}"
    report(f"criterion 5 PASS: mean |F| adaptation ON {mean_on:.3f} N < OFF {mean_off:.3f} N "
           f"({(mean_on - mean_off) / mean_off:+.1%})")


def test_criterion_6_capsule_safety(shipped_runs):
    cfg, run, _ = shipped_runs["obstacle_approach"]
    d_bound = 0.9 * cfg.barriers.d_min
    assert d_bound == pytest.approx(0.27)
    assert run.summary.min_distance >= d_bound, run.summary.min_distance
    # wheel-column coefficients of the safety row are exactly zero at every
    # sampled closed-loop state
    from cotransport.barriers import capsule_safety_row
    for trace in run.traces[::200]:
        snap = whole_body_snapshot(cfg.robot.arm, cfg.robot.base, trace.state.config)
        J_lim = snap.J_m.copy()
        J_lim[:, :2] = 0.0
        capsule = cfg.scene.load_capsule.transformed(snap.ee)
        row = capsule_safety_row(cfg.scene.obstacles[0].position, None, capsule,
                                 J_lim, snap.ee.translation, cfg.barriers)
        assert row.coeffs[0] == 0.0 and row.coeffs[1] == 0.0
    report(f"criterion 6 PASS: min capsule distance {run.summary.min_distance:.3f} m >= 0.27 m, "
           f"wheel columns exactly zero")


def test_criterion_7_workspace_cylinders(shipped_runs):
    cfg, run, _ = shipped_runs["reach_limit"]
    r1, r2 = cfg.barriers.r_inner, cfg.barriers.r_outer
    identity = r2 ** 2 - r1 ** 2

    worst_radial = 0.0
    worst_identity = 0.0
    pinned = 0
    worst_ratio = 0.0
    for trace in run.traces:
        res = trace.result
        _, tool = arm_tool_jacobian_in_base(cfg.robot.arm, trace.state.joint_angles)
        worst_radial = max(worst_radial, float(np.linalg.norm(tool.translation[:2])))
        worst_identity = max(worst_identity, abs(res.h_values["cyl_inner"]
                                                 + res.h_values["cyl_outer"] - identity))
        if res.h_values["cyl_outer"] < 1e-3:
            pinned += 1
            base = cfg.robot.base.with_heading(trace.state.base_pose[2])
            control = control_frame_pose(base, trace.state.base_pose)
            H = h_mapping((trace.state.ee_pose.translation - control.translation)[:2])
            v_wheel = float(np.linalg.norm((H @ base_jacobian_sfl(base) @ res.q_dot[:2])[:3]))
            arm_speed = float(np.linalg.norm(res.q_dot[2:]))
            assert arm_speed < 0.05 * v_wheel, \
                f"t={trace.t:.2f}: arm {arm_speed:.4f} vs 5% of wheel EE speed {v_wheel:.4f}"
            worst_ratio = max(worst_ratio, arm_speed / v_wheel)
    assert worst_radial <= r2 + 1e-3, worst_radial
    assert worst_identity <= 1e-12, worst_identity
    assert pinned > 0, "the reach boundary was never ridden"
    report(f"criterion 7 PASS: radial <= {worst_radial:.4f} (bound {r2 + 1e-3}), "
           f"{pinned} boundary ticks with arm/wheel ratio <= {worst_ratio:.4f} < 0.05, "
           f"identity error {worst_identity:.1e}")


def test_criterion_8_reduction_to_classical_admittance(robot):
    from cotransport.admittance import AdmittanceParams
    from cotransport.barriers import BarrierConfig
    from cotransport.controller import ControlConfig, WholeBodyController
    from cotransport.sim import RobotState, integrate_plant
    from cotransport.tank import init_tank

    from conftest import HOME_JOINTS

    controller = WholeBodyController(
        robot.arm, robot.base, AdmittanceParams(adaptation=False),
        init_tank(1e9, 0.1, 1e10),
        ControlConfig(dt=0.005, pinv_damping=0.0, tank_enabled=False,
                      wheel_limit=1e6, arm_limit=1e6),
        BarrierConfig(capsule_enabled=False, inner_enabled=False, outer_enabled=False))
    state = RobotState.create(robot.arm, robot.base, np.zeros(3), np.zeros(2), HOME_JOINTS)
    rng = np.random.default_rng(42)
    worst = 0.0
    for k in range(400):
        wrench = np.concatenate([rng.normal(0, 8, 3), rng.normal(0, 3, 3)])
        res = controller.step(state.config, wrench, [], k * 0.005)
        J = augmented_jacobian(robot.arm, robot.base, state.config)
        worst = max(worst, float(np.linalg.norm(J @ res.q_dot - res.x_dot_adm)))
        state = integrate_plant(state, robot.arm, robot.base, res.command, 0.005)
    assert worst < 1e-8, worst
    report(f"criterion 8 PASS: ||J qdot - xa_dot|| <= {worst:.2e} < 1e-8 over 400 ticks")


def test_criterion_9_determinism(tmp_path, capsys):
    logs = []
    for k in range(2):
        out = tmp_path / f"run_{k}.csv"
        code = cli_main(["run", str(SCENARIO_DIR / "tank_drain.yaml"),
                         "--out", str(out), "--seed", "7",
                         "--set", "scenario.duration=3.0",
                         "--set", "scenario.noise.wrench_sigma=0.05"])
        assert code == 0
        logs.append(out.read_bytes())
    capsys.readouterr()
    assert logs[0] == logs[1]
    report(f"criterion 9 PASS: repeated run --seed 7 produced byte-identical logs "
           f"({len(logs[0])} bytes)")
