"""Why the measured generator power is the wrong objective.

Two extremum seeking runs with identical tuning, differing only in the
feedback signal: the aerodynamic rotor power P_r (unmeasurable in the
field) steers the gain to K*, while the measured generator power P_g
drags it far away.  A second experiment shows how strongly the P_g loop
reacts to the demodulation phase psi at a fast dither, and how slowing
the dither by a decade collapses that sensitivity.

Run from the repository root:  python3 demos/02_convergence_problem.py
Expect a couple of minutes; figures land in demos/output/.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from escwind import TurbineParams, optimal_torque_gain, run_scenario
from escwind.cli import build_preset, build_scenario

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = TurbineParams()
k_star = optimal_torque_gain(params)


def run(config, name):
    spec = next(sc for sc in config.scenarios if sc.name == name)
    return run_scenario(params, build_scenario(spec, params))


# --- aero vs generator objective (zero demodulation phase) ----------------
fig3 = build_preset("fig3")
fig, ax = plt.subplots(figsize=(7, 4))
for name, label in (("aero_psi0", "objective $P_r$"), ("generator_psi0", "objective $P_g$")):
    trace = run(fig3, name)
    ax.plot(trace.t, trace.K_tilde / k_star, label=label)
    final = trace.K_tilde[-1] / k_star - 1.0
    print(f"{name}: final K/K* deviation {final:+.2%}")
ax.axhline(1.0, ls="--", color="gray")
ax.set_xlabel("time [s]")
ax.set_ylabel("adapted gain $\\tilde K / K^*$")
ax.set_title("ESC with true vs measured power ($\\omega_d$ = 0.1 rad/s, $\\psi$ = 0)")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "aero_vs_generator.png"), dpi=150)

# --- sensitivity to the demodulation phase --------------------------------
fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, preset, title in (
    (axes[0], build_preset("fig4a"), "$\\omega_d$ = 0.1 rad/s"),
    (axes[1], build_preset("fig4b"), "$\\omega_d$ = 0.01 rad/s"),
):
    for tag, psi in (("m30", -30), ("p0", 0), ("p30", +30)):
        trace = run(preset, f"generator_psi{tag}")
        ax.plot(trace.t, trace.K_tilde / k_star, label=f"$\\psi$ = {psi}°")
    ax.axhline(1.0, ls="--", color="gray")
    ax.set_xlabel("time [s]")
    ax.set_title(f"objective $P_g$, {title}")
    ax.legend()
axes[0].set_ylabel("adapted gain $\\tilde K / K^*$")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "psi_sensitivity.png"), dpi=150)

print(f"figures written to {OUT}/")
