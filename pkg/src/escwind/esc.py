"""Dither-demodulation extremum seeking controller.

Pipeline per sample: high-pass filter the objective, demodulate with
sin(omega_d*t + psi), low-pass filter, scale by the integrator gain, integrate
(explicit Euler), and add the dither A_d*sin(omega_d*t) to form the command.
Both first-order filters are discretized with the bilinear (Tustin) transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, SimulationFault


@dataclass(frozen=True)
class EscConfig:
    """Tuning of the extremum seeking loop.

    Filter corners default to the dither-locked choices omega_H = omega_d/5
    and omega_L = 2*omega_d.  The measured objective is multiplied by
    ``objective_scale`` before entering the loop (power objectives are fed in
    MW so that integrator gains stay in a convenient range).
    """

    omega_d: float              # dither frequency, rad/s
    A_d: float                  # dither amplitude, input units
    psi: float = 0.0            # demodulation phase, rad
    kappa: float = 4.0e4        # integrator gain
    u0: float = 0.0             # integrator initial condition
    omega_H: float | None = None
    omega_L: float | None = None
    enable_time: float = 1000.0  # adaptation warm-up: kappa held at 0 before this
    objective_scale: float = 1.0e-6

    def __post_init__(self) -> None:
        if self.omega_H is None:
            object.__setattr__(self, "omega_H", self.omega_d / 5.0)
        if self.omega_L is None:
            object.__setattr__(self, "omega_L", 2.0 * self.omega_d)
        if self.omega_d <= 0 or self.A_d < 0 or self.omega_H <= 0 or self.omega_L <= 0:
            raise ConfigError("dither frequency, amplitude and filter corners must be positive")
        if self.enable_time < 0:
            raise ConfigError("enable_time must be nonnegative")

    @property
    def max_dt(self) -> float:
        """Largest admissible sample time: 50 samples per dither period."""
        return 2.0 * math.pi / (50.0 * self.omega_d)


@dataclass
class EscState:
    """Running filter and integrator state; owned by a single loop."""

    integrator: float = 0.0
    t: float = 0.0
    hp_prev_in: float = 0.0
    hp_prev_out: float = 0.0
    lp_prev_in: float = 0.0
    lp_prev_out: float = 0.0

    @classmethod
    def initial(cls, config: EscConfig) -> "EscState":
        return cls(integrator=config.u0)


def highpass_step(state: EscState, omega_H: float, sample: float, dt: float) -> float:
    """One Tustin step of H(s) = s/(s + omega_H); rejects DC asymptotically."""
    if dt <= 0:
        raise ConfigError("dt must be positive")
    c = omega_H * dt
    out = ((2.0 - c) * state.hp_prev_out + 2.0 * (sample - state.hp_prev_in)) / (2.0 + c)
    state.hp_prev_in = sample
    state.hp_prev_out = out
    return out


def lowpass_step(state: EscState, omega_L: float, sample: float, dt: float) -> float:
    """One Tustin step of L(s) = omega_L/(s + omega_L); unity DC gain."""
    if dt <= 0:
        raise ConfigError("dt must be positive")
    c = omega_L * dt
    out = ((2.0 - c) * state.lp_prev_out + c * (sample + state.lp_prev_in)) / (2.0 + c)
    state.lp_prev_in = sample
    state.lp_prev_out = out
    return out


def demodulate(filtered_sample: float, t: float, omega_d: float, psi: float) -> float:
    """Multiply by the unit-amplitude demodulation signal sin(omega_d*t + psi)."""
    return filtered_sample * math.sin(omega_d * t + psi)


def esc_step(config: EscConfig, state: EscState, J_sample: float, dt: float) -> tuple[float, EscState]:
    """Advance the loop one sample; returns the command u = u_tilde + dither.

    Adaptation (the integrator) is frozen until ``config.enable_time`` while
    the dither and filters keep running, so the gradient estimate is settled
    the moment adaptation starts.
    """
    if not math.isfinite(J_sample):
        raise SimulationFault(f"non-finite objective sample at t={state.t:.6g}")
    if dt > config.max_dt:
        raise ConfigError(
            f"dt={dt:.6g} too coarse for omega_d={config.omega_d:.6g}; "
            f"need dt <= {config.max_dt:.6g} (50 samples per dither period)"
        )
    t = state.t
    hp = highpass_step(state, config.omega_H, config.objective_scale * J_sample, dt)
    xi = demodulate(hp, t, config.omega_d, config.psi)
    u_dot = lowpass_step(state, config.omega_L, xi, dt)
    if t >= config.enable_time:
        state.integrator += config.kappa * u_dot * dt
    state.t = t + dt
    u = state.integrator + config.A_d * math.sin(config.omega_d * t)
    return u, state
