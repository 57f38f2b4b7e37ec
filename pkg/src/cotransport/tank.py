"""Energy-tank bookkeeping and the per-step passivity budget.

The tank stores T = x_t^2 / 2 and may never drop below the floor epsilon.
Each control cycle may extract at most the current budget T - epsilon; that
bound enters the controller QP as one hard linear row in the joint rates.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class EnergyTank:
    state: float            # x_t, sqrt-joule coordinate
    floor: float            # epsilon, minimum stored energy (J)
    ceiling: float          # T_max (J)
    harvest_ratio: float    # fraction of positive inflow kept, in [0, 1]

    @property
    def energy(self) -> float:
        return 0.5 * self.state * self.state


def init_tank(initial_energy: float, floor: float, ceiling: float,
              harvest_ratio: float = 1.0) -> EnergyTank:
    """Tank with T(0) = initial_energy; requires T(0) >= floor > 0 <= ceiling."""
    if not floor > 0.0:
        raise ValueError(f"energy floor must be positive, got {floor}")
    if initial_energy < floor:
        raise ValueError(f"initial energy {initial_energy} below floor {floor}")
    if ceiling < initial_energy:
        raise ValueError(f"ceiling {ceiling} below initial energy {initial_energy}")
    if not 0.0 <= harvest_ratio <= 1.0:
        raise ValueError(f"harvest ratio must lie in [0, 1], got {harvest_ratio}")
    return EnergyTank(np.sqrt(2.0 * initial_energy), floor, ceiling, harvest_ratio)


def budget(tank: EnergyTank) -> float:
    """Maximum extractable energy this instant: T(x_t) - epsilon."""
    return tank.energy - tank.floor


def update_tank(tank: EnergyTank, wrench: np.ndarray, velocity: np.ndarray,
                dt: float) -> EnergyTank:
    """Exchange one step of port energy F^T xd dt with the tank.

    Negative flow drains fully; positive flow fills scaled by harvest_ratio
    and saturates at the ceiling. The controller's QP row guarantees the
    drain never exceeds the budget; if solver tolerance is exceeded the tank
    clamps at the floor and the violation is logged.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    flow = float(np.asarray(wrench, dtype=float) @ np.asarray(velocity, dtype=float)) * dt
    if flow >= 0.0:
        energy = min(tank.energy + tank.harvest_ratio * flow, tank.ceiling)
    else:
        energy = tank.energy + flow
        if energy < tank.floor:
            if tank.floor - energy > 1e-12:
                log.warning("tank budget overdrawn by %.3e J; clamping at floor",
                            tank.floor - energy)
            energy = tank.floor
    return EnergyTank(np.sqrt(2.0 * energy), tank.floor, tank.ceiling, tank.harvest_ratio)


def modulation_gain(tank: EnergyTank, desired_output: np.ndarray) -> np.ndarray:
    """Port modulation A = gamma / x_t; A x_t reconstructs gamma exactly.

    Only defined above the floor, which keeps x_t away from the x_t = 0
    singularity.
    """
    lo = np.sqrt(2.0 * tank.floor)
    if tank.state < lo - 1e-12:
        raise ValueError(f"tank below floor: x_t = {tank.state} < {lo}")
    return np.asarray(desired_output, dtype=float) / tank.state


def energy_constraint_row(tank: EnergyTank, wrench: np.ndarray,
                          jacobian: np.ndarray, dt: float) -> tuple[np.ndarray, float]:
    """Linear row (a, b) meaning a . qd >= b: this step's extraction
    dt F^T J qd may not exceed the current budget."""
    J = np.asarray(jacobian, dtype=float)
    F = np.asarray(wrench, dtype=float).ravel()
    if F.shape != (J.shape[0],):
        raise ValueError(f"wrench dim {F.shape} does not match jacobian rows {J.shape}")
    return dt * (J.T @ F), -budget(tank)
