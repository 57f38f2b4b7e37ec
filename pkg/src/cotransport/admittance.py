"""Time-varying admittance dynamics and online inertia/damping adaptation.

The rendered behavior is a diagonal mass-damper M xdd + D xd = F integrated
with semi-implicit Euler. Damping is retuned every cycle from the inferred
operator intention (accelerate / decelerate / hold) and inertia follows the
damping so the M/D ratio stays intuitive.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TRANSLATION = slice(0, 3)


class Intent(enum.Enum):
    ACCELERATE = "accelerate"
    DECELERATE = "decelerate"
    HOLD = "hold"


@dataclass
class AdmittanceParams:
    """Diagonal admittance parameters and their adaptation constants.

    m_default / d_default are the per-axis rest values (translational axes
    first three, rotational last three). Adaptation acts on the translational
    axes only; rotational axes keep the rest values.
    """

    m_default: np.ndarray = field(default_factory=lambda: np.array([4.0, 4.0, 4.0, 4.0, 4.0, 4.0]))
    d_default: np.ndarray = field(default_factory=lambda: np.array([20.0, 20.0, 20.0, 150.0, 150.0, 150.0]))
    accel_gain: float = 2.0      # damping drop per unit desired acceleration
    decel_gain: float = 4.0      # damping rise per unit desired acceleration
    ratio_shrink: float = 0.5    # steady-state M/D shrink while decelerating, in (0, 1)
    ratio_smooth: float = 0.1    # smoothness of the ratio variation (1/damping units)
    deadband: float = 0.05       # |xdd| below which the intent is Hold (m/s^2)
    hold_tau: float = 0.5        # first-order return-to-default time constant (s)
    accel_filter_tau: float = 0.1  # low-pass on the acceleration fed to adaptation (s); 0 disables
    d_min_frac: float = 0.25
    d_max_frac: float = 4.0
    m_min_frac: float = 0.25
    adaptation: bool = True

    M: np.ndarray = field(init=False)
    D: np.ndarray = field(init=False)

    def __post_init__(self):
        self.m_default = np.asarray(self.m_default, dtype=float).copy()
        self.d_default = np.asarray(self.d_default, dtype=float).copy()
        if self.m_default.shape != self.d_default.shape:
            raise ValueError("inertia and damping defaults must have the same shape")
        if np.any(self.m_default <= 0.0) or np.any(self.d_default <= 0.0):
            raise ValueError("inertia and damping defaults must be strictly positive")
        if not 0.0 < self.ratio_shrink < 1.0:
            raise ValueError("ratio_shrink must lie in (0, 1)")
        if self.ratio_smooth <= 0.0:
            raise ValueError("ratio_smooth must be positive")
        self.M = self.m_default.copy()
        self.D = self.d_default.copy()

    @property
    def dim(self) -> int:
        return self.m_default.size

    @property
    def d_lo(self) -> np.ndarray:
        return self.d_min_frac * self.d_default

    @property
    def d_hi(self) -> np.ndarray:
        return self.d_max_frac * self.d_default

    @property
    def m_lo(self) -> np.ndarray:
        return self.m_min_frac * self.m_default

    def reset(self):
        self.M = self.m_default.copy()
        self.D = self.d_default.copy()


@dataclass
class AdmittanceState:
    """Virtual Cartesian state: pose coordinates, velocity, last acceleration."""

    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray

    @staticmethod
    def zero(dim: int = 6) -> "AdmittanceState":
        return AdmittanceState(np.zeros(dim), np.zeros(dim), np.zeros(dim))


def step_admittance(state: AdmittanceState, params: AdmittanceParams,
                    wrench: np.ndarray, dt: float) -> AdmittanceState:
    """Semi-implicit Euler step of M xdd + D xd = F.

    xdd = M^-1 (F - D xd); xd += dt xdd; x += dt xd.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    F = np.asarray(wrench, dtype=float).ravel()
    if F.shape != (params.dim,) or not np.all(np.isfinite(F)):
        raise ValueError("wrench must be a finite vector matching the task dimension")
    acc = (F - params.D * state.velocity) / params.M
    vel = state.velocity + dt * acc
    pos = state.position + dt * vel
    return AdmittanceState(pos, vel, acc)


def infer_intention(velocity: np.ndarray, acceleration: np.ndarray,
                    deadband: float) -> Intent:
    """Dominant operator intention from desired acceleration vs current velocity.

    Accelerate when they point the same way, decelerate when opposed, hold
    when the acceleration magnitude sits below the deadband. Translational
    axes only.
    """
    v = np.asarray(velocity, dtype=float).ravel()[TRANSLATION]
    a = np.asarray(acceleration, dtype=float).ravel()[TRANSLATION]
    if np.linalg.norm(a) < deadband:
        return Intent.HOLD
    alignment = float(a @ v)
    if alignment > 0.0:
        return Intent.ACCELERATE
    if alignment < 0.0:
        return Intent.DECELERATE
    return Intent.HOLD


def adapt_damping(params: AdmittanceParams, intent: Intent,
                  acceleration: np.ndarray, dt: float) -> np.ndarray:
    """New damping diagonal for the translational axes.

    Accelerate: D = D_f - accel_gain |xdd|; decelerate: D = D_f +
    decel_gain |xdd|; hold: first-order decay back to D_f. Clamped to
    [d_lo, d_hi]. Rotational axes are left at their current values.
    """
    mag = float(np.linalg.norm(np.asarray(acceleration, dtype=float).ravel()[TRANSLATION]))
    D = params.D.copy()
    d_f = params.d_default[TRANSLATION]
    if intent is Intent.ACCELERATE:
        D[TRANSLATION] = d_f - params.accel_gain * mag
    elif intent is Intent.DECELERATE:
        D[TRANSLATION] = d_f + params.decel_gain * mag
    else:
        D[TRANSLATION] += (dt / params.hold_tau) * (d_f - D[TRANSLATION])
    np.clip(D, params.d_lo, params.d_hi, out=D)
    return D


def adapt_inertia(params: AdmittanceParams, intent: Intent,
                  d_new: np.ndarray, dt: float) -> np.ndarray:
    """New inertia diagonal tracking the adapted damping.

    Accelerate holds M/D at the rest ratio; decelerate shrinks the ratio by
    1 - ratio_shrink (1 - exp(-ratio_smooth (D - D_f))); hold decays back to
    M_f. Clamped below at m_lo.
    """
    M = params.M.copy()
    d = np.asarray(d_new, dtype=float).ravel()[TRANSLATION]
    m_f = params.m_default[TRANSLATION]
    d_f = params.d_default[TRANSLATION]
    ratio = m_f / d_f
    if intent is Intent.ACCELERATE:
        M[TRANSLATION] = ratio * d
    elif intent is Intent.DECELERATE:
        shrink = 1.0 - params.ratio_shrink * (1.0 - np.exp(-params.ratio_smooth * (d - d_f)))
        M[TRANSLATION] = ratio * shrink * d
    else:
        M[TRANSLATION] += (dt / params.hold_tau) * (m_f - M[TRANSLATION])
    np.maximum(M, params.m_lo, out=M)
    return M


def adapt_parameters(params: AdmittanceParams, state: AdmittanceState,
                     dt: float, acceleration: np.ndarray | None = None) -> Intent:
    """One adaptation cycle: infer intent, retune D then M in place.

    acceleration overrides the signal fed to inference and the tuning laws
    (the controller passes a low-pass filtered copy to keep the parameter
    updates from chattering on per-tick jitter).
    """
    accel = state.acceleration if acceleration is None else acceleration
    intent = infer_intention(state.velocity, accel, params.deadband)
    if params.adaptation:
        params.D = adapt_damping(params, intent, accel, dt)
        params.M = adapt_inertia(params, intent, params.D, dt)
    return intent
