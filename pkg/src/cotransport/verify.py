"""Oracle-backed property suites, shared by the test suite and the CLI.

Each suite returns (checks_run, failures: list[str]); a failure message names
the configuration and the observed error. The oracles are independent of the
code paths they check: finite differences of the forward maps for Jacobians,
exhaustive enumeration for the QP, the run ledger for passivity.
"""
from __future__ import annotations

import numpy as np

from . import qp
from .barriers import BarrierConfig, capsule_safety_row, inner_cylinder_row, outer_cylinder_row
from .controller import Command
from .geometry import Capsule, capsule_point_distance, so3_log
from .kinematics import (
    ArmModel,
    AugmentedConfig,
    BaseModel,
    arm_contribution_jacobian,
    arm_jacobian,
    arm_tool_jacobian_in_base,
    augmented_jacobian,
    base_jacobian_midpoint,
    base_jacobian_sfl,
    control_frame_pose,
    end_effector_pose,
    forward_kinematics,
    terminal_link_pose,
)

FD_STEP = 1e-6


def pose_twist(pose_plus, pose_minus, h: float) -> np.ndarray:
    """Central-difference twist between two poses: [dp/dt; world angular rate]."""
    v = (pose_plus.translation - pose_minus.translation) / (2.0 * h)
    w = so3_log(pose_plus.rotation @ pose_minus.rotation.T) / (2.0 * h)
    return np.concatenate([v, w])


def relative_error(J_fd: np.ndarray, J: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(J))), 1.0)
    return float(np.max(np.abs(J_fd - J))) / scale


def fd_arm_jacobian(arm: ArmModel, q_a, h: float = FD_STEP) -> np.ndarray:
    """Finite differences of the terminating-link pose in F0."""
    q_a = np.asarray(q_a, dtype=float)
    J = np.zeros((6, q_a.size))
    for i in range(q_a.size):
        dq = np.zeros_like(q_a)
        dq[i] = h
        J[:, i] = pose_twist(terminal_link_pose(arm, q_a + dq),
                             terminal_link_pose(arm, q_a - dq), h)
    return J


def fd_arm_contribution(arm: ArmModel, q_a, base_pose, h: float = FD_STEP) -> np.ndarray:
    """Finite differences of the world end-tip pose w.r.t. the arm joints."""
    q_a = np.asarray(q_a, dtype=float)
    J = np.zeros((6, q_a.size))
    for i in range(q_a.size):
        dq = np.zeros_like(q_a)
        dq[i] = h
        J[:, i] = pose_twist(forward_kinematics(arm, q_a + dq, base_pose),
                             forward_kinematics(arm, q_a - dq, base_pose), h)
    return J


def _integrate_base(base_pose, base: BaseModel, wheel_rates, duration: float,
                    steps: int = 8) -> np.ndarray:
    """Midpoint-rule flow of the unicycle for the wheel-column oracles."""
    from .sim import RobotState, integrate_plant  # local import to avoid a cycle

    x = np.asarray(base_pose, dtype=float).copy()
    dt = duration / steps
    r, L = base.wheel_radius, base.wheel_separation
    w = np.asarray(wheel_rates, dtype=float)
    for _ in range(steps):
        v = r * (w[0] + w[1]) / 2.0
        om = r * (w[0] - w[1]) / L
        th_mid = x[2] + 0.5 * om * dt
        x = x + np.array([v * np.cos(th_mid) * dt, v * np.sin(th_mid) * dt, om * dt])
    return x


def fd_base_jacobian(base: BaseModel, base_pose, control_point: bool,
                     h: float = 1e-5) -> np.ndarray:
    """Finite differences of the midpoint (or control point) position and
    heading under the unicycle flow."""
    J = np.zeros((6, 2))
    for i in range(2):
        rates = np.zeros(2)
        rates[i] = 1.0
        plus = _integrate_base(base_pose, base, rates, h)
        minus = _integrate_base(base_pose, base, rates, -h)
        if control_point:
            p_plus = control_frame_pose(base, plus).translation
            p_minus = control_frame_pose(base, minus).translation
        else:
            p_plus = np.array([plus[0], plus[1], 0.0])
            p_minus = np.array([minus[0], minus[1], 0.0])
        J[:3, i] = (p_plus - p_minus) / (2.0 * h)
        J[5, i] = (plus[2] - minus[2]) / (2.0 * h)
    return J


def fd_augmented_jacobian(arm: ArmModel, base: BaseModel, config: AugmentedConfig,
                          h: float = 1e-5) -> np.ndarray:
    """Finite differences of the world end-effector pose along every augmented
    coordinate; wheel columns follow the unicycle flow."""
    n = config.dim
    J = np.zeros((6, n))
    q_a = config.joint_angles
    for i in range(2):
        rates = np.zeros(2)
        rates[i] = 1.0
        pose_plus = _integrate_base(config.base_pose, base, rates, h)
        pose_minus = _integrate_base(config.base_pose, base, rates, -h)
        ee_plus = end_effector_pose(arm, base, AugmentedConfig(config.wheel_angles, q_a, pose_plus))
        ee_minus = end_effector_pose(arm, base, AugmentedConfig(config.wheel_angles, q_a, pose_minus))
        J[:, i] = pose_twist(ee_plus, ee_minus, h)
    for i in range(q_a.size):
        dq = np.zeros_like(q_a)
        dq[i] = h
        ee_plus = end_effector_pose(arm, base, AugmentedConfig(config.wheel_angles, q_a + dq, config.base_pose))
        ee_minus = end_effector_pose(arm, base, AugmentedConfig(config.wheel_angles, q_a - dq, config.base_pose))
        J[:, 2 + i] = pose_twist(ee_plus, ee_minus, h)
    return J


def random_configs(arm: ArmModel, n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield AugmentedConfig(
            rng.uniform(-np.pi, np.pi, size=2),
            rng.uniform(-np.pi, np.pi, size=arm.n_joints),
            np.array([rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-np.pi, np.pi)]))


def kinematics_suite(arm: ArmModel, base: BaseModel, n_configs: int = 100,
                     tol: float = 1e-6, seed: int = 0) -> tuple[int, list[str]]:
    """Every Jacobian against central finite differences of its forward map."""
    checks, failures = 0, []
    for k, config in enumerate(random_configs(arm, n_configs, seed)):
        q_a = config.joint_angles
        base_now = base.with_heading(float(config.base_pose[2]))
        control = control_frame_pose(base_now, config.base_pose)

        pairs = [
            ("arm", arm_jacobian(arm, q_a), fd_arm_jacobian(arm, q_a)),
            ("arm_contribution", arm_contribution_jacobian(arm, q_a, control),
             fd_arm_contribution(arm, q_a, control)),
            ("base_midpoint", base_jacobian_midpoint(base_now),
             fd_base_jacobian(base_now, config.base_pose, control_point=False)),
            ("base_sfl", base_jacobian_sfl(base_now),
             fd_base_jacobian(base_now, config.base_pose, control_point=True)),
            ("augmented", augmented_jacobian(arm, base_now, config),
             fd_augmented_jacobian(arm, base_now, config)),
        ]
        for name, J, J_fd in pairs:
            checks += 1
            err = relative_error(J_fd, J)
            if err > tol:
                failures.append(f"config {k}: {name} jacobian off by {err:.3e}")
    return checks, failures


def nonholonomy_suite(base: BaseModel, n_headings: int = 360) -> tuple[int, list[str]]:
    """Translational-block ranks: 1 for the midpoint model, 2 for the offset
    control point, at sampled headings; the offset determinant is exact."""
    checks, failures = 0, []
    r, L, b = base.wheel_radius, base.wheel_separation, base.sfl_offset
    expected_det = -(r * r) * b / L
    for k in range(n_headings):
        theta = 2.0 * np.pi * k / n_headings
        bm = base.with_heading(theta)
        checks += 2
        block_mid = base_jacobian_midpoint(bm)[:2, :2]
        s = np.linalg.svd(block_mid, compute_uv=False)
        if not (s[0] > 1e-12 and s[1] < 1e-14 * max(s[0], 1.0)):
            failures.append(f"heading {theta:.3f}: midpoint block rank != 1")
        det = float(np.linalg.det(base_jacobian_sfl(bm)[:2, :2]))
        if abs(det - expected_det) > 1e-15 or det == 0.0:
            failures.append(f"heading {theta:.3f}: sfl det {det} != {expected_det}")
    return checks, failures


def barrier_gradient_suite(arm: ArmModel, base: BaseModel, capsule: Capsule,
                           n_configs: int = 40, tol: float = 1e-6,
                           seed: int = 3) -> tuple[int, list[str]]:
    """Barrier row coefficients against finite differences of each h along the
    arm joints (wheel columns are checked to be exactly zero)."""
    cfg = BarrierConfig()
    rng = np.random.default_rng(seed)
    checks, failures = 0, []
    for k, config in enumerate(random_configs(arm, n_configs, seed)):
        q_a = config.joint_angles
        base_now = base.with_heading(float(config.base_pose[2]))
        ee = end_effector_pose(arm, base_now, config)
        obstacle = ee.translation + rng.uniform(-1.5, 1.5, size=3)

        J_m = augmented_jacobian(arm, base_now, config)
        J_lim = J_m.copy()
        J_lim[:, :2] = 0.0
        capsule_world = capsule.transformed(ee)
        d, closest = capsule_point_distance(capsule_world, obstacle)
        if np.linalg.norm(obstacle - closest) < 0.05:
            continue  # near the axis the distance field is not differentiable

        def h_capsule(q):
            cc = AugmentedConfig(config.wheel_angles, q, config.base_pose)
            cw = capsule.transformed(end_effector_pose(arm, base_now, cc))
            dd, _ = capsule_point_distance(cw, obstacle)
            return dd * dd - cfg.d_min ** 2

        def h_inner(q):
            _, tool = arm_tool_jacobian_in_base(arm, q)
            return float(tool.translation[:2] @ tool.translation[:2]) - cfg.r_inner ** 2

        rows = [
            ("capsule", capsule_safety_row(obstacle, None, capsule_world, J_lim,
                                           ee.translation, cfg), h_capsule),
            ("cyl_inner", inner_cylinder_row(arm, q_a, cfg), h_inner),
            ("cyl_outer", outer_cylinder_row(arm, q_a, cfg),
             lambda q: -h_inner(q) + cfg.r_outer ** 2 - cfg.r_inner ** 2),
        ]
        h = 1e-6
        for name, row, h_fn in rows:
            checks += 1
            if np.any(row.coeffs[:2] != 0.0):
                failures.append(f"config {k}: {name} row touches wheel columns")
                continue
            grad_fd = np.zeros(arm.n_joints)
            for i in range(arm.n_joints):
                dq = np.zeros(arm.n_joints)
                dq[i] = h
                grad_fd[i] = (h_fn(q_a + dq) - h_fn(q_a - dq)) / (2.0 * h)
            err = relative_error(grad_fd, row.coeffs[2:])
            if err > tol:
                failures.append(f"config {k}: {name} gradient off by {err:.3e}")
    return checks, failures


def qp_suite(n_instances: int = 1000, seed: int = 11,
             tol: float = 1e-6, kkt_tol: float = 1e-8) -> tuple[int, list[str]]:
    """Solver against the brute-force oracle on random small instances."""
    rng = np.random.default_rng(seed)
    checks, failures = 0, []
    for trial in range(n_instances):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(0, 9))
        B = rng.normal(size=(n, n))
        H = B @ B.T + np.eye(n) * (0.1 + rng.random())
        f = rng.normal(size=n)
        rows = tuple((rng.normal(size=n), float(rng.normal())) for _ in range(m))
        problem = qp.QpProblem(H, f, rows)
        got = qp.solve(problem)
        want = qp.brute_force_oracle(problem)
        checks += 1
        if got.status != want.status:
            failures.append(f"instance {trial}: status {got.status} vs oracle {want.status}")
            continue
        if got.status is qp.QpStatus.OPTIMAL:
            err = float(np.max(np.abs(got.z - want.z)))
            if err > tol:
                failures.append(f"instance {trial}: optimizer off by {err:.3e}")
            if got.kkt_residual > kkt_tol:
                failures.append(f"instance {trial}: kkt residual {got.kkt_residual:.3e}")
    return checks, failures


def passivity_suite(scenario_path=None) -> tuple[int, list[str]]:
    """Tank floor and cumulative ledger on the adversarial drain scenario."""
    from .config import load_scenario, resolve_scenario
    from .scenario import run_scenario
    import tempfile
    from pathlib import Path

    path = resolve_scenario("tank_drain") if scenario_path is None else scenario_path
    cfg = load_scenario(path)
    with tempfile.TemporaryDirectory() as tmp:
        run = run_scenario(cfg, log_path=Path(tmp) / "tank_drain.csv")
    failures = []
    if not run.summary.tank_floor_ok:
        failures.append(f"tank dropped below the floor (min {run.summary.min_tank:.4f} J)")
    if not run.summary.ledger_ok:
        failures.append(f"passivity ledger violated (margin {run.summary.ledger_margin:.3e} J)")
    return 2, failures
