"""Per-cycle whole-body control law.

Pipeline each tick: infer intent and adapt the admittance parameters, step the
admittance to get the desired twist, map it to joint rates through the damped
pseudo-inverse, then solve one convex QP that trades tracking against the
barrier rows (slack-relaxed) and the hard energy-tank row. The post-QP twist
settles the tank, and the rates are split into wheel and arm setpoints with
direction-preserving saturation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import admittance as adm
from . import barriers as bar
from . import qp
from . import tank as tk
from .geometry import Capsule
from .kinematics import (
    ArmModel,
    AugmentedConfig,
    BaseModel,
    damped_pseudoinverse,
    whole_body_snapshot,
)

log = logging.getLogger(__name__)


@dataclass
class ControlConfig:
    dt: float = 0.005
    slack_weight: float = 1.0e4
    pinv_damping: float = 0.01
    wheel_limit: float = 3.0     # rad/s
    arm_limit: float = 1.5       # rad/s
    tank_enabled: bool = True

    def __post_init__(self):
        if not 0.0 < self.dt <= 0.1:
            raise ValueError(f"dt must lie in (0, 0.1], got {self.dt}")
        if self.slack_weight <= 0.0:
            raise ValueError("slack weight must be positive")


@dataclass
class Command:
    wheels: np.ndarray
    arm: np.ndarray

    @staticmethod
    def zero(n_joints: int) -> "Command":
        return Command(np.zeros(2), np.zeros(n_joints))

    @property
    def q(self) -> np.ndarray:
        return np.concatenate([self.wheels, self.arm])


@dataclass
class ParameterOscillation:
    """Scripted sinusoidal M/D override used by the adversarial drain scenario."""

    amplitude: float = 0.7
    freq_m: float = 0.5
    freq_d: float = 0.8
    phase: float = 1.0

    def apply(self, params: adm.AdmittanceParams, t: float):
        if not 0.0 <= self.amplitude < 1.0:
            raise ValueError("oscillation amplitude must lie in [0, 1)")
        wobble_m = 1.0 + self.amplitude * math.sin(2.0 * math.pi * self.freq_m * t)
        wobble_d = 1.0 + self.amplitude * math.sin(2.0 * math.pi * self.freq_d * t + self.phase)
        params.M = params.m_default.copy()
        params.D = params.d_default.copy()
        params.M[adm.TRANSLATION] *= wobble_m
        params.D[adm.TRANSLATION] *= wobble_d


@dataclass
class StepResult:
    command: Command
    q_dot: np.ndarray
    x_dot_adm: np.ndarray
    x_dot_des: np.ndarray
    wrench: np.ndarray
    tank_energy: float
    tank_budget: float
    intent: adm.Intent
    h_values: dict[str, float]
    slacks: dict[str, float]
    qp_status: qp.QpStatus
    qp_iterations: int
    diag_m: np.ndarray = field(default_factory=lambda: np.zeros(6))
    diag_d: np.ndarray = field(default_factory=lambda: np.zeros(6))


def split_command(q_dot: np.ndarray, wheel_limit: float, arm_limit: float) -> Command:
    """Split joint rates into wheel/arm setpoints, scaling the whole vector
    down if any limit is exceeded so the twist direction is preserved."""
    q_dot = np.asarray(q_dot, dtype=float).ravel()
    wheels, arm = q_dot[:2], q_dot[2:]
    scale = 1.0
    if wheels.size and wheel_limit > 0.0:
        scale = max(scale, float(np.max(np.abs(wheels))) / wheel_limit)
    if arm.size and arm_limit > 0.0:
        scale = max(scale, float(np.max(np.abs(arm))) / arm_limit)
    return Command(wheels / scale, arm / scale)


class WholeBodyController:
    """Stateful per-tick controller; advance with step(), one caller only."""

    def __init__(self, arm: ArmModel, base: BaseModel,
                 params: adm.AdmittanceParams, energy_tank: tk.EnergyTank,
                 control: ControlConfig, barrier_cfg: bar.BarrierConfig,
                 load_capsule: Capsule | None = None,
                 oscillation: ParameterOscillation | None = None):
        self.arm = arm
        self.base = base
        self.params = params
        self.tank = energy_tank
        self.control = control
        self.barrier_cfg = barrier_cfg
        self.load_capsule = load_capsule
        self.oscillation = oscillation
        self.adm_state = adm.AdmittanceState.zero(params.dim)
        self._accel_smooth = np.zeros(params.dim)
        self._warm_start: tuple[int, ...] | None = None
        self._warm_rows = -1

    def reset(self):
        self.adm_state = adm.AdmittanceState.zero(self.params.dim)
        self.params.reset()
        self._accel_smooth = np.zeros(self.params.dim)
        self._warm_start = None
        self._warm_rows = -1

    def _fail_safe(self, reason: str, wrench, intent=adm.Intent.HOLD) -> StepResult:
        log.warning("commanding zero velocity: %s", reason)
        n = self.arm.n_joints
        return StepResult(
            command=Command.zero(n), q_dot=np.zeros(n + 2),
            x_dot_adm=self.adm_state.velocity.copy(), x_dot_des=np.zeros(6),
            wrench=np.zeros(6) if wrench is None else np.asarray(wrench, dtype=float),
            tank_energy=self.tank.energy, tank_budget=tk.budget(self.tank),
            intent=intent, h_values={}, slacks={},
            qp_status=qp.QpStatus.INFEASIBLE, qp_iterations=0,
            diag_m=self.params.M.copy(), diag_d=self.params.D.copy())

    def step(self, robot_config: AugmentedConfig, wrench: np.ndarray,
             obstacles=(), t: float = 0.0) -> StepResult:
        """One control cycle. wrench is the external interaction wrench in the
        world frame; obstacles an iterable of (position, velocity) pairs."""
        wrench = np.asarray(wrench, dtype=float).ravel()
        if wrench.shape != (6,) or not np.all(np.isfinite(wrench)):
            return self._fail_safe("non-finite or malformed wrench", None)

        # 1. intent inference and parameter adaptation (on a smoothed
        # acceleration so per-tick jitter does not chatter the parameters)
        tau = self.params.accel_filter_tau
        blend = 1.0 if tau <= 0.0 else min(self.control.dt / tau, 1.0)
        self._accel_smooth = self._accel_smooth + blend * (self.adm_state.acceleration
                                                           - self._accel_smooth)
        if self.oscillation is not None:
            self.oscillation.apply(self.params, t)
            intent = adm.infer_intention(self.adm_state.velocity, self._accel_smooth,
                                         self.params.deadband)
        else:
            intent = adm.adapt_parameters(self.params, self.adm_state, self.control.dt,
                                          acceleration=self._accel_smooth)

        # 2. admittance integration
        self.adm_state = adm.step_admittance(self.adm_state, self.params, wrench,
                                             self.control.dt)
        x_dot_adm = self.adm_state.velocity.copy()

        # 3. desired joint rates through the damped pseudo-inverse
        snap = whole_body_snapshot(self.arm, self.base, robot_config)
        J_m = snap.J_m
        q_dot_adm = damped_pseudoinverse(J_m, self.control.pinv_damping) @ x_dot_adm

        # 4. QP assembly: z = [q_dot; slacks]
        rows, h_values, slack_names = self._assemble_rows(robot_config, snap, wrench,
                                                          obstacles)
        n = q_dot_adm.size
        n_slack = len(slack_names)
        H = 2.0 * np.diag(np.concatenate([np.ones(n),
                                          self.control.slack_weight * np.ones(n_slack)]))
        f = -2.0 * np.concatenate([q_dot_adm, np.zeros(n_slack)])
        problem = qp.QpProblem(H, f, tuple(rows))

        # 5. solve with warm start while the row structure is unchanged
        warm = self._warm_start if self._warm_rows == problem.n_rows else None
        solution = qp.solve(problem, warm_start=warm)
        if solution.status is not qp.QpStatus.OPTIMAL:
            self._warm_start, self._warm_rows = None, -1
            return self._fail_safe(f"qp returned {solution.status.value}", wrench, intent)
        self._warm_start, self._warm_rows = solution.active_set, problem.n_rows

        q_dot = solution.z[:n]
        slacks = {name: float(solution.z[n + i]) for i, name in enumerate(slack_names)}

        # 6. tank settles on the post-QP twist
        x_dot_des = J_m @ q_dot
        if self.control.tank_enabled:
            self.tank = tk.update_tank(self.tank, wrench, x_dot_des, self.control.dt)

        # 7. split and saturate
        command = split_command(q_dot, self.control.wheel_limit, self.control.arm_limit)

        return StepResult(
            command=command, q_dot=q_dot, x_dot_adm=x_dot_adm, x_dot_des=x_dot_des,
            wrench=wrench, tank_energy=self.tank.energy, tank_budget=tk.budget(self.tank),
            intent=intent, h_values=h_values, slacks=slacks,
            qp_status=solution.status, qp_iterations=solution.iterations,
            diag_m=self.params.M.copy(), diag_d=self.params.D.copy())

    def _assemble_rows(self, robot_config: AugmentedConfig, snap, wrench: np.ndarray,
                       obstacles):
        """Barrier rows (soft, one slack each), slack nonnegativity rows, and
        the hard energy row, in a fixed order for warm-start stability."""
        J_m = snap.J_m
        n = J_m.shape[1]
        cfg = self.barrier_cfg
        tool_state = (snap.J_tool_f0, snap.tool_in_f0)
        barrier_rows: list[bar.BarrierRow] = []

        if cfg.capsule_enabled and self.load_capsule is not None:
            capsule_world = self.load_capsule.transformed(snap.ee)
            J_lim = J_m.copy()
            J_lim[:, :2] = 0.0
            for k, (pos, vel) in enumerate(obstacles):
                barrier_rows.append(bar.capsule_safety_row(
                    pos, vel, capsule_world, J_lim, snap.ee.translation, cfg,
                    slack_index=len(barrier_rows), name=f"capsule_{k}"))
        if cfg.inner_enabled:
            barrier_rows.append(bar.inner_cylinder_row(
                self.arm, robot_config.joint_angles, cfg,
                slack_index=len(barrier_rows), tool_state=tool_state))
        if cfg.outer_enabled:
            barrier_rows.append(bar.outer_cylinder_row(
                self.arm, robot_config.joint_angles, cfg,
                slack_index=len(barrier_rows), tool_state=tool_state))

        n_slack = len(barrier_rows)
        rows: list[tuple[np.ndarray, float]] = []
        h_values: dict[str, float] = {}
        slack_names: list[str] = []
        for row in barrier_rows:
            coeff = np.zeros(n + n_slack)
            coeff[:n] = row.coeffs
            coeff[n + row.slack_index] = 1.0
            rows.append((coeff, row.offset))
            h_values[row.name] = row.h
            slack_names.append(row.name)
        for i in range(n_slack):
            coeff = np.zeros(n + n_slack)
            coeff[n + i] = 1.0
            rows.append((coeff, 0.0))
        if self.control.tank_enabled:
            a, b = tk.energy_constraint_row(self.tank, wrench, J_m, self.control.dt)
            if np.max(np.abs(a)) > 1e-12:
                coeff = np.zeros(n + n_slack)
                coeff[:n] = a
                rows.append((coeff, b))
        return rows, h_values, slack_names
