"""Aerodynamic power estimation from generator power and rotor acceleration.

With the exact acceleration, P_hat_r = I*omega_r*domega_r + P_g reduces
algebraically to the aerodynamic power.  In practice the acceleration comes
from a filtered numerical derivative K_d*s/(T_d*s + 1) of the measured rotor
speed, realized here in Tustin-discretized state-space form.
"""
from __future__ import annotations

from dataclasses import dataclass

from .aero import TurbineParams
from .errors import ConfigError


@dataclass
class DerivFilter:
    """Filtered differentiator state: x_d tracks K_d * omega_r."""

    T_d: float                  # filter time constant, s
    K_d: float = 1.0            # filter gain
    x_d: float = 0.0            # internal state (smoothed K_d*omega_r), rad/s
    prev_in: float = 0.0        # previous input sample

    def __post_init__(self) -> None:
        if self.T_d <= 0 or self.K_d <= 0:
            raise ConfigError("T_d and K_d must be strictly positive")

    @classmethod
    def initial(cls, T_d: float, K_d: float, omega_r0: float) -> "DerivFilter":
        """Start settled at a steady rotor speed (zero initial derivative)."""
        return cls(T_d=T_d, K_d=K_d, x_d=K_d * omega_r0, prev_in=omega_r0)


def deriv_filter_step(filt: DerivFilter, omega_r_sample: float, dt: float) -> tuple[float, DerivFilter]:
    """Advance dx_d/dt = (K_d*u - x_d)/T_d one Tustin step.

    Returns the acceleration estimate (K_d*u - x_d)/T_d evaluated at the new
    step, i.e. the continuous-time right-hand side after the update.
    """
    if dt <= 0:
        raise ConfigError("dt must be positive")
    if dt >= filt.T_d:
        raise ConfigError(
            f"dt={dt:.6g} must be smaller than the filter time constant T_d={filt.T_d:.6g}"
        )
    two_T = 2.0 * filt.T_d
    filt.x_d = (
        (two_T - dt) * filt.x_d
        + filt.K_d * dt * (omega_r_sample + filt.prev_in)
    ) / (two_T + dt)
    filt.prev_in = omega_r_sample
    omega_dot_hat = (filt.K_d * omega_r_sample - filt.x_d) / filt.T_d
    return omega_dot_hat, filt


def estimated_aero_power_exact(
    params: TurbineParams, omega_r: float, omega_dot: float, P_g: float
) -> float:
    """Aerodynamic power estimate I*omega_r*omega_dot + P_g, W."""
    return params.I * omega_r * omega_dot + P_g


def estimated_aero_power(
    filt: DerivFilter,
    params: TurbineParams,
    omega_r_sample: float,
    P_g_sample: float,
    dt: float,
) -> tuple[float, DerivFilter]:
    """Estimate via the filtered numerical derivative of the speed signal."""
    omega_dot_hat, filt = deriv_filter_step(filt, omega_r_sample, dt)
    return estimated_aero_power_exact(params, omega_r_sample, omega_dot_hat, P_g_sample), filt
