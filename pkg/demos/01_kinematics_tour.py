"""A walk through the whole-body kinematic model.

Builds the shipped robot, pokes at the pieces of the end-effector velocity
map, and sanity-checks the augmented Jacobian against finite differences of
the forward map.
"""
import numpy as np

from cotransport.config import load_robot
from cotransport.kinematics import (
    AugmentedConfig,
    augmented_jacobian,
    base_jacobian_midpoint,
    base_jacobian_sfl,
    damped_pseudoinverse,
    end_effector_pose,
)
from cotransport.verify import fd_augmented_jacobian, relative_error

robot = load_robot("src/cotransport/data/robots/diffdrive_6dof.yaml")
home = np.array([0.0, 1.3, -2.6, 1.3, 0.0, 0.0])
config = AugmentedConfig(np.zeros(2), home, np.array([0.0, 0.0, 0.3]))

print("== the base alone ==")
print("midpoint Jacobian (translational 2x2 block is rank 1: no sideways motion):")
print(np.round(base_jacobian_midpoint(robot.base.with_heading(0.3))[:2, :2], 4))
print("control-point Jacobian (offset ahead of the axle, rank 2 for every heading):")
print(np.round(base_jacobian_sfl(robot.base.with_heading(0.3))[:2, :2], 4))

print("\n== the whole body ==")
ee = end_effector_pose(robot.arm, robot.base, config)
print("end effector at", np.round(ee.translation, 3))
J = augmented_jacobian(robot.arm, robot.base, config)
print("augmented Jacobian is 6 x", J.shape[1], " (2 wheels + 6 joints)")

J_fd = fd_augmented_jacobian(robot.arm, robot.base, config)
print(f"max relative error vs finite differences: {relative_error(J_fd, J):.2e}")

print("\n== inverting it ==")
xdot = np.array([0.2, 0.0, 0.0, 0.0, 0.0, 0.0])  # 0.2 m/s straight ahead
qdot = damped_pseudoinverse(J, 0.04) @ xdot
print("wheel rates:", np.round(qdot[:2], 3), "rad/s")
print("joint rates:", np.round(qdot[2:], 3), "rad/s")
print("achieved twist:", np.round(J @ qdot, 4))
