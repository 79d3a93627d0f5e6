"""First-order turbine dynamics under the K*omega^2 torque law.

The rotor obeys I*domega/dt = tau_r - tau_g with tau_g = K*omega^2.  Besides
the derivative itself, this module solves for the stable steady-state rotor
speed at a given (K, V), which anchors all linearizations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .aero import TurbineParams, rotor_torque, tip_speed_ratio
from .errors import DomainError, SolverError


@dataclass
class TurbineState:
    """Dynamic state: rotor angular velocity, rad/s."""

    omega_r: float

    def __post_init__(self) -> None:
        if self.omega_r <= 0:
            raise DomainError(f"rotor speed must be positive, got {self.omega_r}")


@dataclass(frozen=True)
class ControlInput:
    """Torque gain and rotor-effective wind speed acting on the turbine."""

    K: float
    V: float

    def __post_init__(self) -> None:
        if self.K <= 0 or self.V <= 0:
            raise DomainError("K and V must be strictly positive")


def torque_command(K: float, omega_r: float) -> float:
    """Generator torque set point K*omega^2 (assumed equal to actual torque)."""
    return K * omega_r * omega_r


def generator_power(K: float, omega_r: float) -> float:
    """Electrical generator power K*omega^3, W."""
    return torque_command(K, omega_r) * omega_r


def state_derivative(params: TurbineParams, omega_r: float, K: float, V: float) -> float:
    """Rotor acceleration (tau_r - tau_g)/I, rad/s^2."""
    return (rotor_torque(params, omega_r, V) - torque_command(K, omega_r)) / params.I


def steady_state(params: TurbineParams, K: float, V: float) -> float:
    """Stable equilibrium rotor speed solving tau_r(omega, V) = K*omega^2.

    Searches the bracket [0.2, 2.0] * (lambda* V / R), clipped to the Cp
    domain, and returns the root where the torque imbalance has negative
    slope (the dynamically stable branch).
    """
    surf = params.cp_surface
    omega_ref = surf.lam_star * V / params.R
    lo = max(0.2 * omega_ref, surf.lam_min * V / params.R * (1.0 + 1e-9))
    hi = min(2.0 * omega_ref, surf.lam_max * V / params.R * (1.0 - 1e-9))
    if lo >= hi:
        raise SolverError(f"empty equilibrium bracket for K={K}, V={V}")

    def imbalance(omega: float) -> float:
        return rotor_torque(params, omega, V) - torque_command(K, omega)

    grid = np.linspace(lo, hi, 400)
    vals = np.array([imbalance(w) for w in grid])
    signs = np.sign(vals)
    flips = np.nonzero(np.diff(signs) != 0)[0]
    if flips.size == 0:
        raise SolverError(
            f"no equilibrium in omega bracket [{lo:.4g}, {hi:.4g}] "
            f"for K={K:.6g}, V={V:.6g}"
        )
    for i in flips:
        root = brentq(imbalance, grid[i], grid[i + 1], xtol=1e-13, rtol=1e-15)
        h = 1e-6 * root
        slope = (imbalance(root + h) - imbalance(root - h)) / (2.0 * h)
        if slope < 0:
            return root
    raise SolverError(
        f"no stable equilibrium in bracket [{lo:.4g}, {hi:.4g}] "
        f"for K={K:.6g}, V={V:.6g}"
    )
