"""Exception types shared across the package."""


class EscwindError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(EscwindError, ValueError):
    """Physical quantity outside its admissible range (e.g. lambda off the Cp map)."""


class CalibrationError(EscwindError, RuntimeError):
    """Cp surface calibration failed (no interior maximum found)."""


class SolverError(EscwindError, RuntimeError):
    """Equilibrium solver could not bracket or converge on a stable root."""


class ConfigError(EscwindError, ValueError):
    """Invalid configuration (bad key, bad value, or violated precondition)."""


class SimulationFault(EscwindError, RuntimeError):
    """Non-finite signal encountered; the simulation loop halts."""
