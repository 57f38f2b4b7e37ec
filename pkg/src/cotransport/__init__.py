"""Passive whole-body admittance control of a differential-drive mobile
manipulator for collaborative load transport."""

from .admittance import (
    AdmittanceParams,
    AdmittanceState,
    Intent,
    adapt_damping,
    adapt_inertia,
    infer_intention,
    step_admittance,
)
from .geometry import Capsule, Pose, adjoint_of_pose, capsule_point_distance
from .kinematics import (
    ArmJoint,
    ArmModel,
    AugmentedConfig,
    BaseModel,
    arm_contribution_jacobian,
    arm_jacobian,
    augmented_jacobian,
    base_jacobian_midpoint,
    base_jacobian_sfl,
    damped_pseudoinverse,
    forward_kinematics,
    h_mapping,
)
from .qp import QpProblem, QpSolution, QpStatus, brute_force_oracle, solve, verify_kkt
from .tank import EnergyTank, budget, energy_constraint_row, init_tank, modulation_gain, update_tank


def load_scenario(path, overrides=None):
    from .config import load_scenario as _load

    return _load(path, overrides)


def run_scenario(cfg, **kwargs):
    from .scenario import run_scenario as _run

    return _run(cfg, **kwargs)


__version__ = "0.1.0"
