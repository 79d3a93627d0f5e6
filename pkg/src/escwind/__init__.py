"""Simulation and frequency-domain analysis of dither-demodulation extremum
seeking control for wind-turbine K*omega^2 torque gain optimization."""

from .aero import (
    CpSurface,
    TurbineParams,
    optimal_torque_gain,
    rotor_power,
    rotor_torque,
    tip_speed_ratio,
    wind_power,
)
from .errors import (
    CalibrationError,
    ConfigError,
    DomainError,
    EscwindError,
    SimulationFault,
    SolverError,
)
from .esc import EscConfig, EscState, esc_step
from .estimator import DerivFilter, deriv_filter_step, estimated_aero_power, estimated_aero_power_exact
from .linear import (
    LinearModel,
    RationalTf,
    augmented_transfer_function,
    bode_export,
    compensation_angle,
    frequency_response,
    linearize,
    linearize_augmented,
    transfer_functions,
    zero_of_pg,
)
from .sim import (
    ConvergenceMetric,
    DerivConfig,
    Scenario,
    SimTrace,
    convergence_metric,
    run_scenario,
    write_trace_csv,
)
from .turbine import generator_power, state_derivative, steady_state, torque_command

__version__ = "0.1.0"
