"""Aerodynamic power surface and the optimal torque gain.

The Kw^2 controller holds the turbine at the tip-speed ratio where the
torque balance K*omega^2 = tau_r(omega) settles.  Sweeping the gain K and
recording the steady-state aerodynamic power traces out the objective
J(K) that the extremum seeking loop later climbs: a flat-topped, concave
curve with its maximum exactly at K* = pi*rho*R^5*Cp*/(2*lambda*^3).

Run from the repository root:  python3 demos/01_power_surface.py
Figures land in demos/output/.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from escwind import (
    TurbineParams,
    optimal_torque_gain,
    rotor_power,
    steady_state,
    wind_power,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = TurbineParams()
surf = params.cp_surface
k_star = optimal_torque_gain(params)
V = 8.0

print(f"lambda* = {surf.lam_star:.4f}, Cp* = {surf.cp_star:.4f}")
print(f"K*      = {k_star:.6e} N m/(rad/s)^2")

# --- the Cp curve itself -------------------------------------------------
lams = np.linspace(surf.lam_min, surf.lam_max, 400)
cps = [surf.cp(l) for l in lams]

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(lams, cps)
ax.axvline(surf.lam_star, ls="--", color="gray")
ax.annotate(
    f"$\\lambda^*={surf.lam_star:.2f}$\n$C_p^*={surf.cp_star:.3f}$",
    (surf.lam_star, surf.cp_star),
    textcoords="offset points",
    xytext=(10, -30),
)
ax.set_xlabel("tip-speed ratio $\\lambda$")
ax.set_ylabel("power coefficient $C_p$")
ax.set_title("Power coefficient curve (fixed fine pitch)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "cp_curve.png"), dpi=150)

# --- steady-state power against the torque gain --------------------------
factors = np.linspace(0.5, 1.5, 201)
power = np.array(
    [rotor_power(params, steady_state(params, f * k_star, V), V) for f in factors]
)

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(factors, power / wind_power(params, V))
ax.axvline(1.0, ls="--", color="gray")
ax.set_xlabel("torque gain $K / K^*$")
ax.set_ylabel("steady-state $P_r$ / available power")
ax.set_title(f"Steady-state objective at V = {V} m/s")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "power_vs_gain.png"), dpi=150)

best = factors[int(np.argmax(power))]
print(f"sweep maximum at K = {best:.3f} K*  (grid step {factors[1]-factors[0]:.3f})")
print(f"figures written to {OUT}/")
