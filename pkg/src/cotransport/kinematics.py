"""Whole-body kinematics: serial arm, differential-drive base, augmented Jacobian.

Conventions: twists are 6-vectors [v; w] with the linear part being the
velocity of the named reference point, expressed in the named frame. The
augmented coordinate vector is q = [wheel angles (2); arm joints (n_a)].
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import Pose, skew


@dataclass(frozen=True)
class ArmJoint:
    """Revolute joint: rotation of q about axis, followed by the fixed link
    transform to the next joint frame."""

    axis: np.ndarray
    link: Pose

    def __post_init__(self):
        a = np.array(self.axis, dtype=float).ravel()
        n = np.linalg.norm(a)
        if a.shape != (3,) or n < 1e-12:
            raise ValueError("joint axis must be a nonzero 3-vector")
        a = a / n
        a.setflags(write=False)
        object.__setattr__(self, "axis", a)
        # cached Rodrigues terms: R(q) = I + sin(q) K + (1 - cos(q)) K^2
        K = skew(a)
        K2 = K @ K
        K.setflags(write=False)
        K2.setflags(write=False)
        object.__setattr__(self, "_K", K)
        object.__setattr__(self, "_K2", K2)

    def rotation(self, q: float) -> np.ndarray:
        return np.eye(3) + np.sin(q) * self._K + (1.0 - np.cos(q)) * self._K2


@dataclass(frozen=True)
class ArmModel:
    """Serial revolute chain with fixed mount and tool transforms.

    mount: base control frame -> arm base frame F0 (constant).
    tool: terminating link frame -> end-tip frame (constant).
    """

    joints: tuple[ArmJoint, ...]
    mount: Pose
    tool: Pose

    def __post_init__(self):
        if len(self.joints) < 1:
            raise ValueError("arm needs at least one joint")
        object.__setattr__(self, "joints", tuple(self.joints))

    @property
    def n_joints(self) -> int:
        return len(self.joints)


@dataclass(frozen=True)
class BaseModel:
    """Differential-drive base geometry plus current heading."""

    wheel_radius: float
    wheel_separation: float
    sfl_offset: float
    heading: float = 0.0

    def __post_init__(self):
        if self.wheel_radius <= 0.0 or self.wheel_separation <= 0.0:
            raise ValueError("wheel radius and separation must be positive")

    def with_heading(self, theta: float) -> "BaseModel":
        return replace(self, heading=float(theta))


@dataclass(frozen=True)
class AugmentedConfig:
    """Augmented configuration: wheel angles, arm joints, and the base planar
    pose (x, y, theta) carried alongside (wheel angles do not determine it)."""

    wheel_angles: np.ndarray
    joint_angles: np.ndarray
    base_pose: np.ndarray

    def __post_init__(self):
        qb = np.array(self.wheel_angles, dtype=float).ravel()
        qa = np.array(self.joint_angles, dtype=float).ravel()
        pose = np.array(self.base_pose, dtype=float).ravel()
        if qb.shape != (2,):
            raise ValueError("expected exactly two wheel angles")
        if pose.shape != (3,):
            raise ValueError("base pose must be (x, y, theta)")
        for arr in (qb, qa, pose):
            arr.setflags(write=False)
        object.__setattr__(self, "wheel_angles", qb)
        object.__setattr__(self, "joint_angles", qa)
        object.__setattr__(self, "base_pose", pose)

    @property
    def dim(self) -> int:
        return 2 + self.joint_angles.size

    @property
    def q(self) -> np.ndarray:
        return np.concatenate([self.wheel_angles, self.joint_angles])


def _check_joint_vector(arm: ArmModel, q_a) -> np.ndarray:
    q = np.asarray(q_a, dtype=float).ravel()
    if q.shape != (arm.n_joints,):
        raise ValueError(f"expected {arm.n_joints} joint angles, got {q.shape}")
    return q


def arm_chain(arm: ArmModel, q_a) -> tuple[np.ndarray, np.ndarray, Pose]:
    """Walk the chain in F0: joint origins (n,3), joint axes (n,3), and the
    terminating link pose."""
    q = _check_joint_vector(arm, q_a)
    origins = np.zeros((arm.n_joints, 3))
    axes = np.zeros((arm.n_joints, 3))
    R = np.eye(3)
    t = np.zeros(3)
    for i, (joint, qi) in enumerate(zip(arm.joints, q)):
        origins[i] = t
        axes[i] = R @ joint.axis
        R = R @ joint.rotation(qi)
        t = t + R @ joint.link.translation
        R = R @ joint.link.rotation
    return origins, axes, Pose._trusted(R, t)


def forward_kinematics(arm: ArmModel, q_a, base_pose: Pose | None = None) -> Pose:
    """End-tip pose in the world frame: base_pose . mount . chain(q_a) . tool.

    base_pose is the base control frame in the world; None means the base
    control frame is the world frame.
    """
    _, _, terminal = arm_chain(arm, q_a)
    world_from_control = base_pose if base_pose is not None else Pose.identity()
    return world_from_control @ arm.mount @ terminal @ arm.tool


def terminal_link_pose(arm: ArmModel, q_a) -> Pose:
    """Terminating link frame in F0 (no mount, no tool)."""
    return arm_chain(arm, q_a)[2]


def _jacobian_to_point(origins: np.ndarray, axes: np.ndarray,
                       point: np.ndarray) -> np.ndarray:
    """Columns [z_i x (point - p_i); z_i] for every joint, all in F0."""
    J = np.empty((6, origins.shape[0]))
    J[:3] = np.cross(axes, point[None, :] - origins).T
    J[3:] = axes.T
    return J


def arm_jacobian(arm: ArmModel, q_a) -> np.ndarray:
    """Geometric Jacobian of the terminating link frame w.r.t. F0, in F0.

    Column i is [z_i x (p_end - p_i); z_i] with z_i the joint axis through
    p_i and p_end the terminating link origin, all in F0.
    """
    origins, axes, terminal = arm_chain(arm, q_a)
    return _jacobian_to_point(origins, axes, terminal.translation)


def shift_twist_reference(J: np.ndarray, displacement: np.ndarray) -> np.ndarray:
    """Move the linear-velocity reference point of a twist Jacobian by
    displacement = p_new - p_old (in the Jacobian's frame)."""
    S = np.eye(6)
    S[:3, 3:] = -skew(displacement)
    return S @ J


def arm_tool_jacobian_in_base(arm: ArmModel, q_a) -> tuple[np.ndarray, Pose]:
    """Jacobian of the tool point in F0 plus the tool pose in F0; equivalent
    to shifting the terminating-link Jacobian by the tool offset."""
    origins, axes, terminal = arm_chain(arm, q_a)
    tool_in_f0 = terminal @ arm.tool
    return _jacobian_to_point(origins, axes, tool_in_f0.translation), tool_in_f0


def arm_contribution_jacobian(arm: ArmModel, q_a, base_pose: Pose | None = None) -> np.ndarray:
    """End-tip twist in the world frame caused by joint motion only.

    Built as rotation(world-from-F0) . point-shift(tool offset in F0) . J_a;
    the reference point rides the body, so frame changes enter as pure
    rotations of both twist halves.
    """
    world_from_f0 = (base_pose @ arm.mount) if base_pose is not None else arm.mount
    J_tool, _ = arm_tool_jacobian_in_base(arm, q_a)
    R = world_from_f0.rotation
    rot6 = np.zeros((6, 6))
    rot6[:3, :3] = R
    rot6[3:, 3:] = R
    return rot6 @ J_tool


def base_jacobian_midpoint(base: BaseModel) -> np.ndarray:
    """Unicycle Jacobian at the wheel-axis midpoint: wheel rates -> world twist."""
    r, L, th = base.wheel_radius, base.wheel_separation, base.heading
    c, s = np.cos(th), np.sin(th)
    J = np.zeros((6, 2))
    J[0, :] = [r * c / 2.0, r * c / 2.0]
    J[1, :] = [r * s / 2.0, r * s / 2.0]
    J[5, :] = [r / L, -r / L]
    return J


def base_jacobian_sfl(base: BaseModel) -> np.ndarray:
    """Jacobian at the feedback-linearization control point offset sfl_offset
    ahead of the axle; its 2x2 translational block has rank 2 for every heading."""
    b = base.sfl_offset
    if b <= 0.0:
        raise ValueError(f"sfl offset must be strictly positive, got {b}")
    r, L, th = base.wheel_radius, base.wheel_separation, base.heading
    c, s = np.cos(th), np.sin(th)
    J = np.zeros((6, 2))
    J[0, :] = [r * c / 2.0 - b * r * s / L, r * c / 2.0 + b * r * s / L]
    J[1, :] = [r * s / 2.0 + b * r * c / L, r * s / 2.0 - b * r * c / L]
    J[5, :] = [r / L, -r / L]
    return J


def h_mapping(ee_xy) -> np.ndarray:
    """Maps the base control-point twist to the end-effector contribution.

    ee_xy is the planar offset of the end effector from the control point,
    expressed in the same frame as the base twist. Only x, y and yaw rows are
    populated: the base cannot lift or tilt the end effector.
    """
    x, y = np.asarray(ee_xy, dtype=float).ravel()
    H = np.zeros((6, 6))
    H[0, 0] = 1.0
    H[1, 1] = 1.0
    H[5, 5] = 1.0
    H[0, 5] = -y
    H[1, 5] = x
    return H


def control_frame_pose(base: BaseModel, base_pose) -> Pose:
    """World pose of the base control frame for a midpoint pose (x, y, theta)."""
    x, y, th = np.asarray(base_pose, dtype=float).ravel()
    b = base.sfl_offset
    return Pose.planar(x + b * np.cos(th), y + b * np.sin(th), th)


def end_effector_pose(arm: ArmModel, base: BaseModel, config: AugmentedConfig) -> Pose:
    return forward_kinematics(arm, config.joint_angles,
                              control_frame_pose(base, config.base_pose))


def arm_joint_points(arm: ArmModel, base: BaseModel, config: AugmentedConfig) -> np.ndarray:
    """World positions of the arm base, every joint origin, and the tool point;
    used for drawing and diagnostics."""
    world_from_f0 = control_frame_pose(base, config.base_pose) @ arm.mount
    origins, _, terminal = arm_chain(arm, config.joint_angles)
    tool = (terminal @ arm.tool).translation
    pts = np.vstack([np.zeros(3), origins, terminal.translation, tool])
    return np.array([world_from_f0.apply(p) for p in pts])


@dataclass(frozen=True)
class WholeBodySnapshot:
    """Everything the controller needs for one configuration, computed with a
    single chain walk."""

    control: Pose          # base control frame in the world
    ee: Pose               # end-effector pose in the world
    tool_in_f0: Pose       # end-effector pose in the arm base frame
    J_m: np.ndarray        # 6xN augmented Jacobian
    J_tool_f0: np.ndarray  # 6xn_a tool-point Jacobian in F0 (cylinder rows)


def whole_body_snapshot(arm: ArmModel, base: BaseModel,
                        config: AugmentedConfig) -> WholeBodySnapshot:
    theta = float(config.base_pose[2])
    base_now = base.with_heading(theta)
    control = control_frame_pose(base_now, config.base_pose)

    J_tool_f0, tool_in_f0 = arm_tool_jacobian_in_base(arm, config.joint_angles)
    world_from_f0 = control @ arm.mount
    R = world_from_f0.rotation
    J_A = np.vstack([R @ J_tool_f0[:3], R @ J_tool_f0[3:]])

    ee = world_from_f0 @ tool_in_f0
    J_B = base_jacobian_sfl(base_now)
    H = h_mapping((ee.translation - control.translation)[:2])
    return WholeBodySnapshot(control=control, ee=ee, tool_in_f0=tool_in_f0,
                             J_m=np.hstack([H @ J_B, J_A]), J_tool_f0=J_tool_f0)


def augmented_jacobian(arm: ArmModel, base: BaseModel, config: AugmentedConfig) -> np.ndarray:
    """6xN block Jacobian [H J_B | J_A] mapping [wheel rates; joint rates] to
    the world end-effector twist."""
    return whole_body_snapshot(arm, base, config).J_m


def damped_pseudoinverse(J: np.ndarray, damping: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudo-inverse (damping=0, singular values below
    1e-10*sigma_max dropped) or damped least-squares inverse via the filter
    sigma / (sigma^2 + damping^2)."""
    J = np.asarray(J, dtype=float)
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    if damping == 0.0:
        cutoff = 1e-10 * (s[0] if s.size else 0.0)
        inv_s = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    else:
        inv_s = s / (s * s + damping * damping)
    return Vt.T @ np.diag(inv_s) @ U.T
