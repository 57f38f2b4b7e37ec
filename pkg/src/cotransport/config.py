"""Robot description and scenario configuration files.

Both are YAML key-value trees; all lengths are meters and angles radians.
Scenario files reference the robot description by a path relative to
themselves. Overrides use dotted paths into the scenario tree, e.g.
``admittance.adaptation=false``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .admittance import AdmittanceParams
from .barriers import BarrierConfig
from .controller import ControlConfig, ParameterOscillation
from .geometry import Capsule, Pose, rot_z, so3_exp
from .kinematics import ArmJoint, ArmModel, BaseModel
from .sim import Obstacle, Scene, VirtualHuman
from .tank import EnergyTank, init_tank

SCENARIO_DIR_ENV = "COTRANSPORT_SCENARIO_DIR"


class ConfigError(Exception):
    """Invalid configuration; the message names the file, key path, and, for
    syntax errors, the line."""


def _fail(path, keypath: str, message: str):
    raise ConfigError(f"{path}: {keypath}: {message}")


def load_yaml(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such file")
    try:
        with open(path) as fh:
            tree = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown location"
        raise ConfigError(f"{path}: syntax error at {where}: {exc}") from exc
    if not isinstance(tree, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return tree


def _get(tree: dict, keypath: str, path, default=_fail):
    node = tree
    for part in keypath.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is _fail:
                raise ConfigError(f"{path}: missing required key {keypath!r}")
            return default
        node = node[part]
    return node


def _pose(node, path, keypath: str) -> Pose:
    if node is None:
        return Pose.identity()
    if not isinstance(node, dict):
        _fail(path, keypath, "expected a mapping with translation/rpy")
    t = np.asarray(node.get("translation", [0.0, 0.0, 0.0]), dtype=float)
    rpy = np.asarray(node.get("rpy", [0.0, 0.0, 0.0]), dtype=float)
    if t.shape != (3,) or rpy.shape != (3,):
        _fail(path, keypath, "translation and rpy must be 3-vectors")
    R = rot_z(rpy[2]) @ so3_exp([0.0, rpy[1], 0.0]) @ so3_exp([rpy[0], 0.0, 0.0])
    return Pose(R, t)


@dataclass
class RobotDescription:
    name: str
    arm: ArmModel
    base: BaseModel
    capsules: list[Capsule] = field(default_factory=list)

    @property
    def load_capsule(self) -> Capsule | None:
        return self.capsules[0] if self.capsules else None


def load_robot(path) -> RobotDescription:
    path = Path(path)
    tree = load_yaml(path)
    base_node = _get(tree, "base", path)
    try:
        base = BaseModel(
            wheel_radius=float(_get(base_node, "wheel_radius", path)),
            wheel_separation=float(_get(base_node, "wheel_separation", path)),
            sfl_offset=float(_get(base_node, "sfl_offset", path)),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: base: {exc}") from exc

    joints = []
    for i, jnode in enumerate(_get(tree, "arm.joints", path)):
        keypath = f"arm.joints[{i}]"
        if not isinstance(jnode, dict) or "axis" not in jnode:
            _fail(path, keypath, "joint needs an axis")
        try:
            joints.append(ArmJoint(axis=np.asarray(jnode["axis"], dtype=float),
                                   link=_pose(jnode.get("link"), path, keypath)))
        except ValueError as exc:
            raise ConfigError(f"{path}: {keypath}: {exc}") from exc
    try:
        arm = ArmModel(joints=tuple(joints),
                       mount=_pose(tree.get("mount"), path, "mount"),
                       tool=_pose(tree.get("tool"), path, "tool"))
    except ValueError as exc:
        raise ConfigError(f"{path}: arm: {exc}") from exc

    capsules = []
    for i, cnode in enumerate(tree.get("capsules", []) or []):
        keypath = f"capsules[{i}]"
        try:
            capsules.append(Capsule(np.asarray(cnode["p1"], dtype=float),
                                    np.asarray(cnode["p2"], dtype=float),
                                    float(cnode["radius"])))
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"{path}: {keypath}: {exc}") from exc

    return RobotDescription(name=str(tree.get("name", path.stem)), arm=arm,
                            base=base, capsules=capsules)


@dataclass
class ScenarioConfig:
    name: str
    path: Path
    robot: RobotDescription
    dt: float
    duration: float
    seed: int
    wrench_sigma: float
    initial_base_pose: np.ndarray
    initial_joint_angles: np.ndarray
    admittance: AdmittanceParams
    oscillation: ParameterOscillation | None
    tank: EnergyTank
    tank_enabled: bool
    barriers: BarrierConfig
    control: ControlConfig
    human: VirtualHuman
    scene: Scene
    log_path: Path


def _build_admittance(node: dict, path) -> tuple[AdmittanceParams, ParameterOscillation | None]:
    kwargs = {}
    for key in ("accel_gain", "decel_gain", "ratio_shrink", "ratio_smooth",
                "deadband", "hold_tau", "accel_filter_tau",
                "d_min_frac", "d_max_frac", "m_min_frac"):
        if key in node:
            kwargs[key] = float(node[key])
    if "m_default" in node:
        kwargs["m_default"] = np.asarray(node["m_default"], dtype=float)
    if "d_default" in node:
        kwargs["d_default"] = np.asarray(node["d_default"], dtype=float)
    if "adaptation" in node:
        kwargs["adaptation"] = bool(node["adaptation"])
    try:
        params = AdmittanceParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: admittance: {exc}") from exc
    osc = None
    if node.get("oscillation"):
        onode = node["oscillation"]
        osc = ParameterOscillation(
            amplitude=float(onode.get("amplitude", 0.7)),
            freq_m=float(onode.get("freq_m", 0.5)),
            freq_d=float(onode.get("freq_d", 0.8)),
            phase=float(onode.get("phase", 1.0)))
    return params, osc


def load_scenario(path, overrides: dict[str, object] | None = None) -> ScenarioConfig:
    path = Path(path)
    tree = load_yaml(path)
    for keypath, value in (overrides or {}).items():
        apply_override(tree, keypath, value, path)

    robot_ref = _get(tree, "robot", path)
    robot_path = Path(robot_ref)
    if not robot_path.is_absolute():
        robot_path = path.parent / robot_path
    robot = load_robot(robot_path)

    snode = tree.get("scenario", {})
    dt = float(snode.get("dt", 0.005))
    duration = float(_get(snode, "duration", path))
    seed = int(snode.get("seed", 0))
    wrench_sigma = float(_get(snode, "noise.wrench_sigma", path, 0.0))

    initial = snode.get("initial", {})
    base_pose = np.asarray(initial.get("base_pose", [0.0, 0.0, 0.0]), dtype=float)
    joints = np.asarray(initial.get("joint_angles", np.zeros(robot.arm.n_joints)), dtype=float)
    if joints.shape != (robot.arm.n_joints,):
        _fail(path, "scenario.initial.joint_angles", f"expected {robot.arm.n_joints} values")

    params, oscillation = _build_admittance(tree.get("admittance", {}), path)

    tnode = tree.get("tank", {})
    tank_enabled = bool(tnode.get("enabled", True))
    try:
        the_tank = init_tank(float(tnode.get("initial", 2.0)),
                             float(tnode.get("floor", 0.1)),
                             float(tnode.get("ceiling", 20.0)),
                             float(tnode.get("harvest_ratio", 1.0)))
    except ValueError as exc:
        raise ConfigError(f"{path}: tank: {exc}") from exc

    bnode = tree.get("barriers", {})
    try:
        barriers = BarrierConfig(
            d_min=float(bnode.get("d_min", 0.3)),
            r_inner=float(bnode.get("r_inner", 0.3)),
            r_outer=float(bnode.get("r_outer", 1.0)),
            alpha_gain=float(bnode.get("alpha_gain", 5.0)),
            capsule_enabled=bool(bnode.get("capsule", True)),
            inner_enabled=bool(bnode.get("inner", True)),
            outer_enabled=bool(bnode.get("outer", True)),
            slack_weight=float(bnode.get("slack_weight", 1.0e4)))
    except ValueError as exc:
        raise ConfigError(f"{path}: barriers: {exc}") from exc

    cnode = tree.get("control", {})
    try:
        control = ControlConfig(
            dt=dt,
            slack_weight=barriers.slack_weight,
            pinv_damping=float(cnode.get("pinv_damping", 0.01)),
            wheel_limit=float(cnode.get("wheel_limit", 3.0)),
            arm_limit=float(cnode.get("arm_limit", 1.5)),
            tank_enabled=tank_enabled)
    except ValueError as exc:
        raise ConfigError(f"{path}: control: {exc}") from exc

    hnode = tree.get("human", {})
    waypoints = hnode.get("waypoints", [{"t": 0.0, "pos": [0.0, 0.0, 0.0]}])
    try:
        human = VirtualHuman(
            stiffness=np.asarray(hnode.get("stiffness", 200.0), dtype=float),
            damping=float(hnode.get("damping", 40.0)),
            f_max=float(hnode.get("f_max", 60.0)),
            times=[float(w["t"]) for w in waypoints],
            points=[np.asarray(w["pos"], dtype=float) for w in waypoints])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: human.waypoints: {exc}") from exc

    obstacles = []
    for i, onode in enumerate(snode.get("obstacles", []) or []):
        try:
            obstacles.append(Obstacle(
                position=np.asarray(onode["pos"], dtype=float),
                velocity=np.asarray(onode.get("vel", [0.0, 0.0, 0.0]), dtype=float)))
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"{path}: scenario.obstacles[{i}]: {exc}") from exc
    scene = Scene(obstacles=obstacles, load_capsule=robot.load_capsule)

    log_path = Path(_get(tree, "output.log", path, f"logs/{tree.get('name', path.stem)}.csv"))

    return ScenarioConfig(
        name=str(tree.get("name", path.stem)), path=path, robot=robot, dt=dt,
        duration=duration, seed=seed, wrench_sigma=wrench_sigma,
        initial_base_pose=base_pose, initial_joint_angles=joints,
        admittance=params, oscillation=oscillation, tank=the_tank,
        tank_enabled=tank_enabled, barriers=barriers, control=control,
        human=human, scene=scene, log_path=log_path)


OVERRIDE_SCHEMA = frozenset({
    "name", "robot",
    "scenario.dt", "scenario.duration", "scenario.seed",
    "scenario.noise.wrench_sigma",
    "scenario.initial.base_pose", "scenario.initial.joint_angles",
    "admittance.m_default", "admittance.d_default", "admittance.adaptation",
    "admittance.accel_gain", "admittance.decel_gain", "admittance.ratio_shrink",
    "admittance.ratio_smooth", "admittance.deadband", "admittance.hold_tau",
    "admittance.accel_filter_tau",
    "admittance.d_min_frac", "admittance.d_max_frac", "admittance.m_min_frac",
    "admittance.oscillation.amplitude", "admittance.oscillation.freq_m",
    "admittance.oscillation.freq_d", "admittance.oscillation.phase",
    "tank.enabled", "tank.initial", "tank.floor", "tank.ceiling", "tank.harvest_ratio",
    "barriers.capsule", "barriers.inner", "barriers.outer", "barriers.d_min",
    "barriers.r_inner", "barriers.r_outer", "barriers.alpha_gain", "barriers.slack_weight",
    "control.pinv_damping", "control.wheel_limit", "control.arm_limit",
    "human.stiffness", "human.damping", "human.f_max",
    "output.log",
})


def apply_override(tree: dict, keypath: str, value, path="<override>"):
    """Set a dotted-path key to a YAML-parsed value; the path is validated
    against the config schema so typos are rejected."""
    if keypath not in OVERRIDE_SCHEMA:
        raise ConfigError(f"{path}: unknown override path {keypath!r}")
    parts = keypath.split(".")
    node = tree
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{path}: override path {keypath!r} collides with a scalar")
    if isinstance(value, str):
        value = yaml.safe_load(value)
    node[parts[-1]] = value


def parse_override_arg(arg: str) -> tuple[str, str]:
    if "=" not in arg:
        raise ConfigError(f"override {arg!r} must look like key.path=value")
    key, value = arg.split("=", 1)
    return key.strip(), value.strip()


def default_scenario_dir() -> Path:
    env = os.environ.get(SCENARIO_DIR_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("cotransport") / "data" / "scenarios"))


def resolve_scenario(ref: str) -> Path:
    """Accept a filesystem path or a bare scenario name from the default dir."""
    p = Path(ref)
    if p.exists():
        return p
    candidate = default_scenario_dir() / f"{ref}.yaml"
    if candidate.exists():
        return candidate
    raise ConfigError(f"scenario {ref!r} not found (also tried {candidate})")
