"""Closed-loop scenario engine: wires the controller to the plant, the scene,
and the scripted operator, and streams tick records to a CSV log.

Runs are deterministic for a given config and seed. In-run invariants (tank
floor, cumulative passivity ledger) are tracked every tick and reported in
the run summary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .controller import StepResult, WholeBodyController
from .geometry import capsule_point_distance
from .logs import LogWriter
from .sim import RobotState, human_wrench, integrate_plant, transport_wrench


@dataclass
class RunSummary:
    name: str
    ticks: int
    mean_force: float
    min_distance: float
    min_tank: float
    max_slack: float
    ledger_margin: float          # cumulative extraction minus the passive bound
    tank_floor_ok: bool
    ledger_ok: bool
    barriers_min_h: float
    log_path: str

    @property
    def invariants_ok(self) -> bool:
        return self.tank_floor_ok and self.ledger_ok

    def as_dict(self) -> dict:
        return {
            "name": self.name, "ticks": self.ticks,
            "mean_force": self.mean_force, "min_distance": self.min_distance,
            "min_tank": self.min_tank, "max_slack": self.max_slack,
            "ledger_margin": self.ledger_margin,
            "tank_floor_ok": self.tank_floor_ok, "ledger_ok": self.ledger_ok,
            "barriers_min_h": self.barriers_min_h, "log_path": self.log_path,
        }


@dataclass
class TickTrace:
    """One tick of everything the acceptance checks need, kept in memory."""

    t: float
    state: RobotState
    result: StepResult
    grip_position: np.ndarray


@dataclass
class ScenarioRun:
    summary: RunSummary
    traces: list[TickTrace] = field(default_factory=list)


def build_controller(cfg: ScenarioConfig) -> WholeBodyController:
    return WholeBodyController(
        arm=cfg.robot.arm, base=cfg.robot.base, params=cfg.admittance,
        energy_tank=cfg.tank, control=cfg.control, barrier_cfg=cfg.barriers,
        load_capsule=cfg.scene.load_capsule, oscillation=cfg.oscillation)


def grip_point(state: RobotState, cfg: ScenarioConfig) -> np.ndarray:
    """World position of the free plank end (the operator's grip)."""
    capsule = cfg.scene.capsule_world(state.ee_pose)
    if capsule is None:
        return state.ee_pose.translation.copy()
    return capsule.p2.copy()


def run_scenario(cfg: ScenarioConfig, log_path: Path | None = None,
                 seed: int | None = None, keep_traces: bool = False) -> ScenarioRun:
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    controller = build_controller(cfg)
    state = RobotState.create(cfg.robot.arm, cfg.robot.base, cfg.initial_base_pose,
                              np.zeros(2), cfg.initial_joint_angles)
    scene = cfg.scene
    dt = cfg.dt
    n_ticks = int(round(cfg.duration / dt))
    n_coords = 2 + cfg.robot.arm.n_joints

    slack_names = _slack_names(cfg)
    out_path = Path(log_path) if log_path is not None else cfg.log_path
    if not out_path.is_absolute():
        out_path = Path.cwd() / out_path

    grip_prev = grip_point(state, cfg)
    grip_vel = np.zeros(3)

    extracted = 0.0                      # sum of F_e . x_des dt, the port ledger
    passive_bound = -(cfg.tank.energy - cfg.tank.floor)
    min_tank = math.inf
    min_distance = math.inf
    max_slack = 0.0
    min_h = math.inf
    force_sum = 0.0
    tank_floor_ok = True
    ledger_ok = True
    traces: list[TickTrace] = []

    with LogWriter(out_path, n_coords, slack_names) as writer:
        for k in range(n_ticks):
            t = k * dt
            grip_wrench = human_wrench(cfg.human, grip_prev, grip_vel, t)
            if cfg.wrench_sigma > 0.0:
                grip_wrench = grip_wrench + np.concatenate([
                    rng.normal(0.0, cfg.wrench_sigma, size=3), np.zeros(3)])
            # the sensor sees the grip force with its lever-arm moment
            wrench = transport_wrench(grip_wrench, grip_prev, state.ee_pose.translation)

            result = controller.step(state.config, wrench,
                                     scene.controller_obstacles(), t)

            extracted += float(result.wrench[:3] @ result.x_dot_des[:3]
                               + result.wrench[3:] @ result.x_dot_des[3:]) * dt
            tol = 1e-9 * (k + 1)
            if extracted < passive_bound - tol:
                ledger_ok = False
            if result.tank_energy < cfg.tank.floor - 1e-12:
                tank_floor_ok = False
            min_tank = min(min_tank, result.tank_energy)
            force_sum += float(np.linalg.norm(result.wrench[:3]))
            if result.slacks:
                max_slack = max(max_slack, max(abs(v) for v in result.slacks.values()))
            for h in result.h_values.values():
                min_h = min(min_h, h)
            # geometric clearance, measured whether or not the barrier is active
            capsule_world = scene.capsule_world(state.ee_pose)
            if capsule_world is not None:
                for obs in scene.obstacles:
                    d, _ = capsule_point_distance(capsule_world, obs.position)
                    min_distance = min(min_distance, d)

            writer.write(_record(t, state, result, slack_names))
            if keep_traces:
                traces.append(TickTrace(t=t, state=state, result=result,
                                        grip_position=grip_prev.copy()))

            state = integrate_plant(state, cfg.robot.arm, cfg.robot.base,
                                    result.command, dt)
            scene.advance(dt)
            grip_now = grip_point(state, cfg)
            grip_vel = (grip_now - grip_prev) / dt
            grip_prev = grip_now

    summary = RunSummary(
        name=cfg.name, ticks=n_ticks,
        mean_force=force_sum / max(n_ticks, 1),
        min_distance=min_distance, min_tank=min_tank, max_slack=max_slack,
        ledger_margin=extracted - passive_bound,
        tank_floor_ok=tank_floor_ok, ledger_ok=ledger_ok,
        barriers_min_h=min_h, log_path=str(out_path))
    return ScenarioRun(summary=summary, traces=traces)


def _slack_names(cfg: ScenarioConfig) -> list[str]:
    names = []
    if cfg.barriers.capsule_enabled and cfg.scene.load_capsule is not None:
        names += [f"capsule_{k}" for k in range(len(cfg.scene.obstacles))]
    if cfg.barriers.inner_enabled:
        names.append("cyl_inner")
    if cfg.barriers.outer_enabled:
        names.append("cyl_outer")
    return names


def _record(t: float, state: RobotState, result: StepResult,
            slack_names: list[str]) -> list:
    h = result.h_values
    h_safe = min((v for k, v in h.items() if k.startswith("capsule")), default=math.nan)
    values: list = [t]
    values += list(state.wheel_angles) + list(state.joint_angles)
    values += list(result.q_dot)
    values += list(result.x_dot_adm)
    values += list(result.x_dot_des)
    values += list(result.wrench)
    values += [result.tank_energy, result.tank_budget]
    values += list(result.diag_m) + list(result.diag_d)
    values += [result.intent.value, h_safe,
               h.get("cyl_inner", math.nan), h.get("cyl_outer", math.nan)]
    values += [result.slacks.get(name, 0.0) for name in slack_names]
    values += [result.qp_status.value, result.qp_iterations]
    return values
