"""Fixed-step closed-loop simulation of turbine, ESC and power estimator.

The plant is integrated with classical RK4 at the ESC sample rate; the
command computed from the measurements at t_i is held over [t_i, t_i + dt).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .aero import TurbineParams, wind_power
from .errors import ConfigError, DomainError, SimulationFault
from .esc import EscConfig, EscState, esc_step
from .estimator import DerivFilter
from .turbine import steady_state

TRACE_HEADER = ["t", "omega_r", "K_total", "K_tilde", "P_r", "P_g", "P_hat_r", "J"]

OBJECTIVES = ("aero", "generator", "estimated")


@dataclass(frozen=True)
class DerivConfig:
    """Derivative-filter settings for the estimated-power objective."""

    T_d: float
    K_d: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """Declarative description of one closed-loop experiment."""

    objective: str              # "aero" | "generator" | "estimated"
    wind: float                 # constant rotor-effective wind speed, m/s
    esc: EscConfig
    duration: float             # simulated time, s
    k_init: float               # initial torque gain (ESC integrator start)
    dt: float = 0.01
    esc_enable_time: float = 1000.0
    deriv: DerivConfig | None = None
    decimation: int = 1         # record every n-th sample
    noise_std: float = 0.0      # objective measurement noise, W (0 = off)
    seed: int = 0
    omega0: float | None = None  # initial rotor speed; default: equilibrium at k_init

    def __post_init__(self) -> None:
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}; expected one of {OBJECTIVES}")
        if self.objective == "estimated":
            if self.deriv is None:
                raise ConfigError("estimated objective requires a deriv filter config")
            if self.dt >= self.deriv.T_d:
                raise ConfigError(
                    f"dt={self.dt:.6g} must be smaller than the derivative "
                    f"filter time constant T_d={self.deriv.T_d:.6g}"
                )
        if self.wind <= 0 or self.duration <= 0 or self.k_init <= 0:
            raise ConfigError("wind, duration and k_init must be positive")
        if not 0 <= self.esc_enable_time < self.duration:
            raise ConfigError("need duration > esc_enable_time >= 0")
        if self.dt <= 0 or self.dt > self.esc.max_dt:
            raise ConfigError(
                f"dt={self.dt:.6g} violates the ESC sampling bound {self.esc.max_dt:.6g}"
            )
        if self.decimation < 1:
            raise ConfigError("decimation must be >= 1")


@dataclass(frozen=True)
class SimTrace:
    """Uniformly sampled time series of one scenario run."""

    scenario: Scenario
    t: np.ndarray
    omega_r: np.ndarray
    K_total: np.ndarray
    K_tilde: np.ndarray
    P_r: np.ndarray
    P_g: np.ndarray
    P_hat_r: np.ndarray | None
    J: np.ndarray


def run_scenario(params: TurbineParams, scenario: Scenario) -> SimTrace:
    """Integrate the closed loop and return the sampled trace."""
    sc = scenario
    V = sc.wind
    surf = params.cp_surface
    cp_func = surf.cp_func
    lam_lo, lam_hi = surf.lam_min, surf.lam_max
    lam_fac = params.R / V
    torque_coef = 0.5 * params.rho * params.A * params.R * V * V
    power_coef = wind_power(params, V)
    I = params.I
    dt = sc.dt

    def accel(w: float, K: float) -> float:
        lam = w * lam_fac
        if not lam_lo <= lam <= lam_hi:
            raise DomainError(
                f"tip-speed ratio {lam:.6g} outside Cp domain "
                f"[{lam_lo:.6g}, {lam_hi:.6g}]"
            )
        return (torque_coef * cp_func(lam) / lam - K * w * w) / I

    config = replace(sc.esc, u0=sc.k_init, enable_time=sc.esc_enable_time)
    esc_state = EscState.initial(config)
    omega = sc.omega0 if sc.omega0 is not None else steady_state(params, sc.k_init, V)
    estimated = sc.objective == "estimated"
    deriv = DerivFilter.initial(sc.deriv.T_d, sc.deriv.K_d, omega) if estimated else None

    rng = np.random.default_rng(sc.seed) if sc.noise_std > 0 else None

    n_steps = int(round(sc.duration / dt))
    rec_idx = range(0, n_steps, sc.decimation)
    n_rec = len(rec_idx)
    cols = {name: np.empty(n_rec) for name in ("t", "omega_r", "K_total", "K_tilde", "P_r", "P_g", "J")}
    p_hat_col = np.empty(n_rec) if estimated else None

    k_applied = sc.k_init
    rec = 0
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n_steps):
        t = i * dt
        if not math.isfinite(omega):
            raise SimulationFault(f"non-finite rotor speed at t={t:.6g} s")
        lam = omega * lam_fac
        if not lam_lo <= lam <= lam_hi:
            raise DomainError(
                f"tip-speed ratio {lam:.6g} outside Cp domain at t={t:.6g} s"
            )
        p_r = cp_func(lam) * power_coef
        p_g = k_applied * omega ** 3
        if estimated:
            two_T = 2.0 * deriv.T_d
            deriv.x_d = ((two_T - dt) * deriv.x_d + deriv.K_d * dt * (omega + deriv.prev_in)) / (two_T + dt)
            deriv.prev_in = omega
            omega_dot_hat = (deriv.K_d * omega - deriv.x_d) / deriv.T_d
            p_hat = I * omega * omega_dot_hat + p_g
            j = p_hat
        elif sc.objective == "aero":
            j = p_r
        else:
            j = p_g
        if rng is not None:
            j += sc.noise_std * rng.standard_normal()

        u, esc_state = esc_step(config, esc_state, j, dt)

        if i % sc.decimation == 0:
            cols["t"][rec] = t
            cols["omega_r"][rec] = omega
            cols["K_total"][rec] = u
            cols["K_tilde"][rec] = esc_state.integrator
            cols["P_r"][rec] = p_r
            cols["P_g"][rec] = p_g
            cols["J"][rec] = j
            if estimated:
                p_hat_col[rec] = p_hat
            rec += 1

        # RK4 step of the rotor dynamics with the new command held constant
        k1 = accel(omega, u)
        k2 = accel(omega + half * k1, u)
        k3 = accel(omega + half * k2, u)
        k4 = accel(omega + dt * k3, u)
        omega = omega + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        k_applied = u

    return SimTrace(
        scenario=sc,
        t=cols["t"],
        omega_r=cols["omega_r"],
        K_total=cols["K_total"],
        K_tilde=cols["K_tilde"],
        P_r=cols["P_r"],
        P_g=cols["P_g"],
        P_hat_r=p_hat_col,
        J=cols["J"],
    )


@dataclass(frozen=True)
class ConvergenceMetric:
    """Trailing-window statistics of the ESC integrator state."""

    mean: float
    spread: float               # max - min over the window
    rel_deviation: float        # (mean - K*) / K*


def convergence_metric(trace: SimTrace, window_periods: float, k_star: float) -> ConvergenceMetric:
    """Mean/spread of K_tilde over the trailing whole dither periods."""
    period = 2.0 * math.pi / trace.scenario.esc.omega_d
    t_start = trace.t[-1] - window_periods * period
    if t_start < trace.t[0]:
        raise ConfigError("trace shorter than the requested averaging window")
    window = trace.K_tilde[trace.t >= t_start]
    mean = float(np.mean(window))
    return ConvergenceMetric(
        mean=mean,
        spread=float(np.max(window) - np.min(window)),
        rel_deviation=(mean - k_star) / k_star,
    )


def write_trace_csv(trace: SimTrace, path) -> None:
    """Write the trace with the fixed header; P_hat_r is empty when absent."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRACE_HEADER)
        has_hat = trace.P_hat_r is not None
        for i in range(trace.t.size):
            w.writerow(
                [
                    repr(float(trace.t[i])),
                    repr(float(trace.omega_r[i])),
                    repr(float(trace.K_total[i])),
                    repr(float(trace.K_tilde[i])),
                    repr(float(trace.P_r[i])),
                    repr(float(trace.P_g[i])),
                    repr(float(trace.P_hat_r[i])) if has_hat else "",
                    repr(float(trace.J[i])),
                ]
            )
