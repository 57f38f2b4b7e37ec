"""Barrier rows for the controller QP: capsule obstacle clearance around the
carried load plus inner/outer workspace cylinders for the arm.

Each task contributes one linear row a . qd + delta >= b (delta >= 0 a slack
variable) whose coefficient vector is the gradient of its barrier function h
along the generalized coordinates, and whose offset encodes -alpha(h) and any
obstacle-motion term. The capsule task deliberately acts through the arm
alone: wheel columns are exactly zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Capsule, capsule_point_distance
from .kinematics import ArmModel, arm_tool_jacobian_in_base, shift_twist_reference


@dataclass(frozen=True)
class BarrierRow:
    """One inequality row over the joint rates.

    Soft rows (slack_index set) mean a . qd + delta >= b; hard rows drop the
    slack. h is carried along for logging.
    """

    name: str
    coeffs: np.ndarray
    offset: float
    slack_index: int | None = None
    hard: bool = False
    h: float = np.nan


@dataclass
class BarrierConfig:
    d_min: float = 0.3        # capsule-to-obstacle safety distance (m)
    r_inner: float = 0.3      # self-collision cylinder radius around the arm base (m)
    r_outer: float = 1.0      # reach cylinder radius (m)
    alpha_gain: float = 5.0   # linear class-K gain (1/s)
    capsule_enabled: bool = True
    inner_enabled: bool = True
    outer_enabled: bool = True
    slack_weight: float = 1.0e4

    def __post_init__(self):
        if not 0.0 < self.r_inner < self.r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        if self.d_min <= 0.0 or self.alpha_gain <= 0.0:
            raise ValueError("d_min and alpha_gain must be positive")


def class_k(h: float, alpha_gain: float) -> float:
    """Linear extended class-K function: strictly increasing, zero at zero."""
    return alpha_gain * h


def capsule_safety_row(obstacle_pos: np.ndarray, obstacle_vel: np.ndarray | None,
                       load_capsule: Capsule, J_lim: np.ndarray,
                       tool_position: np.ndarray, config: BarrierConfig,
                       slack_index: int | None = None,
                       name: str = "capsule") -> BarrierRow:
    """Clearance row h = d^2 - d_min^2 for one obstacle against the load capsule.

    J_lim is the world twist Jacobian at the tool point with the wheel columns
    already zeroed (only the arm performs this task). The gradient is taken at
    the material point of the capsule axis currently closest to the obstacle;
    a moving obstacle adds its own rate of change of h to the offset.
    """
    obstacle = np.asarray(obstacle_pos, dtype=float).ravel()
    d, closest = capsule_point_distance(load_capsule, obstacle)
    h = d * d - config.d_min * config.d_min

    gap = obstacle - closest
    norm = float(np.linalg.norm(gap))
    n = gap / norm if norm > 1e-9 else np.zeros(3)

    J_point = shift_twist_reference(J_lim, closest - np.asarray(tool_position, dtype=float))
    coeffs = -2.0 * d * (n @ J_point[:3])

    dh_dt = 0.0
    if obstacle_vel is not None:
        v = np.asarray(obstacle_vel, dtype=float).ravel()
        dh_dt = 2.0 * d * float(n @ v)

    return BarrierRow(name=name, coeffs=coeffs,
                      offset=-class_k(h, config.alpha_gain) - dh_dt,
                      slack_index=slack_index, h=h)


def _cylinder_gradient(arm: ArmModel, q_a, tool_state=None,
                       n_wheels: int = 2) -> tuple[np.ndarray, float]:
    """Gradient of the squared tool radial distance d1^2 in F0 along the
    generalized coordinates, plus d1^2 itself. Base motion moves F0 with the
    arm, so wheel columns vanish identically."""
    if tool_state is None:
        J_tool, tool = arm_tool_jacobian_in_base(arm, q_a)
    else:
        J_tool, tool = tool_state
    xy = tool.translation[:2]
    grad = np.zeros(n_wheels + arm.n_joints)
    grad[n_wheels:] = 2.0 * xy @ J_tool[:2]
    return grad, float(xy @ xy)


def inner_cylinder_row(arm: ArmModel, q_a, config: BarrierConfig,
                       slack_index: int | None = None, tool_state=None) -> BarrierRow:
    """Keep the tool outside the cylinder r_inner around the arm base:
    h = d1^2 - r_inner^2."""
    grad, d1_sq = _cylinder_gradient(arm, q_a, tool_state)
    h = d1_sq - config.r_inner ** 2
    return BarrierRow(name="cyl_inner", coeffs=grad,
                      offset=-class_k(h, config.alpha_gain),
                      slack_index=slack_index, h=h)


def outer_cylinder_row(arm: ArmModel, q_a, config: BarrierConfig,
                       slack_index: int | None = None, tool_state=None) -> BarrierRow:
    """Keep the tool inside the reach cylinder r_outer: h = r_outer^2 - d1^2.
    On the boundary the row blocks outward radial arm motion, so the base has
    to carry the transport."""
    grad, d1_sq = _cylinder_gradient(arm, q_a, tool_state)
    h = config.r_outer ** 2 - d1_sq
    return BarrierRow(name="cyl_outer", coeffs=-grad,
                      offset=-class_k(h, config.alpha_gain),
                      slack_index=slack_index, h=h)
