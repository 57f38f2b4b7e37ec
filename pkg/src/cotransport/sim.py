"""Discrete-time plant, scene, and the scripted operator standing in for the
human side of the transport."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .controller import Command
from .geometry import Capsule, Pose
from .kinematics import ArmModel, AugmentedConfig, BaseModel, end_effector_pose


@dataclass
class RobotState:
    """Plant state plus a cached end-effector pose kept coherent with it."""

    base_pose: np.ndarray      # (x, y, theta), wheel-axis midpoint
    wheel_angles: np.ndarray
    joint_angles: np.ndarray
    ee_pose: Pose

    @staticmethod
    def create(arm: ArmModel, base: BaseModel, base_pose, wheel_angles,
               joint_angles) -> "RobotState":
        config = AugmentedConfig(wheel_angles, joint_angles, base_pose)
        return RobotState(np.asarray(base_pose, dtype=float).copy(),
                          np.asarray(wheel_angles, dtype=float).copy(),
                          np.asarray(joint_angles, dtype=float).copy(),
                          end_effector_pose(arm, base, config))

    @property
    def config(self) -> AugmentedConfig:
        return AugmentedConfig(self.wheel_angles, self.joint_angles, self.base_pose)


def integrate_plant(state: RobotState, arm: ArmModel, base: BaseModel,
                    cmd: Command, dt: float) -> RobotState:
    """Advance wheels, unicycle base pose, and arm joints by one step.

    The base pose integrates the midpoint model with the heading evaluated at
    the half step, which makes the update second-order accurate.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    r, L = base.wheel_radius, base.wheel_separation
    wl, wr = cmd.wheels
    v = r * (wl + wr) / 2.0
    omega = r * (wl - wr) / L
    x, y, th = state.base_pose
    th_mid = th + 0.5 * omega * dt
    new_pose = np.array([x + v * np.cos(th_mid) * dt,
                         y + v * np.sin(th_mid) * dt,
                         th + omega * dt])
    return RobotState.create(arm, base, new_pose,
                             state.wheel_angles + cmd.wheels * dt,
                             state.joint_angles + cmd.arm * dt)


@dataclass
class Obstacle:
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).copy()
        self.velocity = np.asarray(self.velocity, dtype=float).copy()
        if not np.all(np.isfinite(self.position)):
            raise ValueError("obstacle position must be finite")

    @property
    def moving(self) -> bool:
        return bool(np.any(self.velocity != 0.0))


@dataclass
class Scene:
    """Obstacles plus the capsule wrapping the carried load (tool frame)."""

    obstacles: list[Obstacle] = field(default_factory=list)
    load_capsule: Capsule | None = None

    def capsule_world(self, ee_pose: Pose) -> Capsule | None:
        if self.load_capsule is None:
            return None
        return self.load_capsule.transformed(ee_pose)

    def advance(self, dt: float):
        for obs in self.obstacles:
            obs.position = obs.position + obs.velocity * dt

    def controller_obstacles(self):
        """(position, velocity-or-None) pairs; static obstacles report None so
        no time-variation term is added to their rows."""
        return [(o.position, o.velocity if o.moving else None) for o in self.obstacles]


@dataclass
class VirtualHuman:
    """Spring-damper proxy for the operator gripping the free plank end.

    Tracks a piecewise-linear waypoint path (times strictly increasing); the
    force is clamped at f_max and carries no torque. stiffness may be a
    per-axis 3-vector: a person holds the carrying direction firmly but
    yields when the load wanders sideways or vertically.
    """

    stiffness: float | np.ndarray = 200.0
    damping: float = 40.0
    f_max: float = 60.0
    times: np.ndarray = field(default_factory=lambda: np.zeros(1))
    points: np.ndarray = field(default_factory=lambda: np.zeros((1, 3)))

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float).ravel()
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 3)
        self.stiffness = np.broadcast_to(np.asarray(self.stiffness, dtype=float).ravel(), (3,)).copy()
        if self.times.size != self.points.shape[0] or self.times.size == 0:
            raise ValueError("need one waypoint position per waypoint time")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("waypoint times must be strictly increasing")
        if np.any(self.stiffness < 0.0) or self.damping < 0.0:
            raise ValueError("stiffness and damping must be nonnegative")

    def target(self, t: float) -> np.ndarray:
        return np.array([np.interp(t, self.times, self.points[:, k]) for k in range(3)])


def human_wrench(human: VirtualHuman, plank_end_position: np.ndarray,
                 plank_end_velocity: np.ndarray, t: float) -> np.ndarray:
    """World-frame wrench the operator applies at the grip point: a saturated
    spring-damper toward the current path target, zero torque."""
    error = human.target(t) - np.asarray(plank_end_position, dtype=float)
    force = human.stiffness * error - human.damping * np.asarray(plank_end_velocity, dtype=float)
    magnitude = float(np.linalg.norm(force))
    if magnitude > human.f_max > 0.0:
        force = force * (human.f_max / magnitude)
    return np.concatenate([force, np.zeros(3)])


def transport_wrench(wrench: np.ndarray, application_point: np.ndarray,
                     reference_point: np.ndarray) -> np.ndarray:
    """Move a wrench's reference point: a force applied out on the plank shows
    up at the sensor as the same force plus the lever-arm moment r x F."""
    w = np.asarray(wrench, dtype=float).ravel()
    r = np.asarray(application_point, dtype=float) - np.asarray(reference_point, dtype=float)
    return np.concatenate([w[:3], w[3:] + np.cross(r, w[:3])])
