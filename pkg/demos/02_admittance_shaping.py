"""How the admittance parameters move with the operator's intention.

Steps the virtual mass-damper through a pull / coast / brake profile and
prints the inferred intention alongside the adapted inertia and damping.
"""
import numpy as np

from cotransport.admittance import AdmittanceParams, AdmittanceState, adapt_parameters, step_admittance

params = AdmittanceParams()   # 4 kg / 20 Ns/m rest values on the translational axes
state = AdmittanceState.zero()
dt = 0.005

print(f"{'t':>5} {'F_x':>6} {'v_x':>6} {'intent':<12} {'M_x':>5} {'D_x':>6}")
accel_filter = np.zeros(6)
for k in range(1400):
    t = k * dt
    if t < 2.0:
        fx = 16.0        # pull: intention flips to accelerate, damping drops
    elif t < 4.0:
        fx = 4.0         # ease off: hold, parameters relax to rest
    else:
        fx = -12.0       # brake: decelerate, damping rises to help stop
    wrench = np.array([fx, 0, 0, 0, 0, 0])
    accel_filter += min(dt / params.accel_filter_tau, 1.0) * (state.acceleration - accel_filter)
    intent = adapt_parameters(params, state, dt, acceleration=accel_filter)
    state = step_admittance(state, params, wrench, dt)
    if k % 100 == 0:
        print(f"{t:5.2f} {fx:6.1f} {state.velocity[0]:6.2f} {intent.value:<12} "
              f"{params.M[0]:5.2f} {params.D[0]:6.2f}")

print("\nratio M/D stays near the rest ratio while accelerating "
      f"({params.m_default[0] / params.d_default[0]:.2f}); braking raises D so the "
      "robot sheds speed without the operator fighting it.")
