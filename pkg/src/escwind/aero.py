"""Static aerodynamic relations for a fixed-pitch wind turbine rotor.

Provides the power/torque coefficient curve Cp(lambda) at a fixed fine-pitch
setting (with analytic gradient), available wind power, rotor torque/power,
and the optimal torque gain of the K*omega^2 control law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import CalibrationError, DomainError

#: Betz limit, the theoretical maximum of Cp.
BETZ_LIMIT = 16.0 / 27.0

# Calibration targets for the default NREL 5-MW-like curve (publicly known
# characteristics of that rotor; the exact tables are not available).
NREL5MW_LAMBDA_STAR = 7.55
NREL5MW_CP_STAR = 0.482


@dataclass(frozen=True)
class CpSurface:
    """Power coefficient curve Cp(lambda) on a bounded lambda domain.

    The curve must be smooth and unimodal on [lam_min, lam_max]; the interior
    maximizer (lam_star, cp_star) is located at construction time.  The torque
    coefficient follows as Ctau(lambda) = Cp(lambda)/lambda.
    """

    cp_func: Callable[[float], float]
    dcp_func: Callable[[float], float]
    lam_min: float
    lam_max: float
    lam_star: float = field(init=False)
    cp_star: float = field(init=False)

    def __post_init__(self) -> None:
        lam_star = _locate_maximizer(self.dcp_func, self.lam_min, self.lam_max)
        object.__setattr__(self, "lam_star", lam_star)
        object.__setattr__(self, "cp_star", self.cp_func(lam_star))
        if self.cp_star > BETZ_LIMIT:
            raise CalibrationError(
                f"Cp maximum {self.cp_star:.4f} exceeds the Betz limit"
            )

    def _check(self, lam: float) -> float:
        lam = float(lam)
        if not self.lam_min <= lam <= self.lam_max:
            raise DomainError(
                f"tip-speed ratio {lam:.6g} outside Cp domain "
                f"[{self.lam_min:.6g}, {self.lam_max:.6g}]"
            )
        return lam

    def cp(self, lam: float) -> float:
        return self.cp_func(self._check(lam))

    def dcp_dlam(self, lam: float) -> float:
        return self.dcp_func(self._check(lam))

    def ctau(self, lam: float) -> float:
        lam = self._check(lam)
        return self.cp_func(lam) / lam

    def dctau_dlam(self, lam: float) -> float:
        lam = self._check(lam)
        return (self.dcp_func(lam) * lam - self.cp_func(lam)) / (lam * lam)

    @staticmethod
    def exponential(
        c1: float = 0.5176,
        c2: float = 116.0,
        c4: float = 5.0,
        c5: float = 21.0,
        c6: float = 0.0068,
        c7: float = 0.035,
        lam_min: float = 2.0,
        lam_max: float = 12.0,
        arg_scale: float = 1.0,
        gain: float = 1.0,
    ) -> "CpSurface":
        """Exponential-family curve Cp(l) = gain * f(arg_scale * l), with
        f(x) = c1*(c2*y - c4)*exp(-c5*y) + c6*x and y = 1/x - c7.
        """

        def cp(lam: float) -> float:
            x = arg_scale * lam
            y = 1.0 / x - c7
            return gain * (c1 * (c2 * y - c4) * math.exp(-c5 * y) + c6 * x)

        def dcp(lam: float) -> float:
            x = arg_scale * lam
            y = 1.0 / x - c7
            e = math.exp(-c5 * y)
            dfdx = c1 * e * (c2 - c5 * (c2 * y - c4)) * (-1.0 / (x * x)) + c6
            return gain * arg_scale * dfdx

        return CpSurface(cp, dcp, lam_min, lam_max)

    @staticmethod
    def nrel5mw() -> "CpSurface":
        """Default curve: exponential family recalibrated so the maximum sits
        at lambda* = 7.55 with Cp* = 0.482."""
        base = CpSurface.exponential()
        scale = base.lam_star / NREL5MW_LAMBDA_STAR
        gain = NREL5MW_CP_STAR / base.cp_star
        return CpSurface.exponential(
            arg_scale=scale,
            gain=gain,
            lam_min=2.0 / scale,
            lam_max=12.0 / scale,
        )

    @staticmethod
    def from_csv(path) -> "CpSurface":
        """Tabulated curve from a CSV file with header ``lambda,cp``.

        Requires >= 10 rows and a strictly monotone lambda column.  The curve
        and its gradient come from a cubic-spline interpolant.
        """
        data = np.genfromtxt(path, delimiter=",", names=True)
        if data.dtype.names is None or tuple(data.dtype.names) != ("lambda", "cp"):
            raise DomainError(f"{path}: expected CSV header 'lambda,cp'")
        lam = np.asarray(data["lambda"], dtype=float)
        cp = np.asarray(data["cp"], dtype=float)
        if lam.size < 10:
            raise DomainError(f"{path}: need >= 10 rows, got {lam.size}")
        if np.any(np.diff(lam) <= 0):
            raise DomainError(f"{path}: lambda column must be strictly increasing")
        spline = CubicSpline(lam, cp)
        dspline = spline.derivative()
        return CpSurface(
            lambda l: float(spline(l)),
            lambda l: float(dspline(l)),
            float(lam[0]),
            float(lam[-1]),
        )


def _locate_maximizer(dcp: Callable[[float], float], lam_min: float, lam_max: float) -> float:
    """Find the unique interior zero crossing (+ to -) of dCp/dlambda."""
    grid = np.linspace(lam_min, lam_max, 2001)
    vals = np.array([dcp(l) for l in grid])
    signs = np.sign(vals)
    flips = np.nonzero(np.diff(signs) != 0)[0]
    if flips.size != 1:
        raise CalibrationError(
            f"Cp curve must have exactly one interior stationary point, "
            f"found {flips.size} gradient sign changes"
        )
    i = flips[0]
    if not (vals[i] > 0 > vals[i + 1]):
        raise CalibrationError("Cp stationary point is not a maximum")
    return brentq(dcp, grid[i], grid[i + 1], xtol=1e-13)


@dataclass(frozen=True)
class TurbineParams:
    """Physical constants of the rotor and drivetrain (rigid, direct drive)."""

    rho: float = 1.225          # air density, kg/m^3
    R: float = 63.0             # rotor radius, m
    I: float = 4.0e7            # combined rotor+drivetrain inertia, kg m^2
    beta: float = 0.0           # fixed fine pitch, rad
    cp_surface: CpSurface = field(default_factory=CpSurface.nrel5mw)

    def __post_init__(self) -> None:
        if self.rho <= 0 or self.R <= 0 or self.I <= 0:
            raise DomainError("rho, R and I must be strictly positive")

    @property
    def A(self) -> float:
        """Rotor swept area pi R^2, m^2."""
        return math.pi * self.R * self.R


def wind_power(params: TurbineParams, V: float) -> float:
    """Available wind power 0.5*rho*A*V^3 in the rotor-swept area, W."""
    if V < 0:
        raise DomainError(f"wind speed must be nonnegative, got {V}")
    return 0.5 * params.rho * params.A * V ** 3


def tip_speed_ratio(omega_r: float, R: float, V: float) -> float:
    """Tip-speed ratio omega_r*R/V (dimensionless)."""
    if V <= 0:
        raise DomainError(f"wind speed must be positive, got {V}")
    return omega_r * R / V


def rotor_torque(params: TurbineParams, omega_r: float, V: float) -> float:
    """Aerodynamic rotor torque 0.5*rho*A*R*V^2*Ctau(lambda), N m."""
    lam = tip_speed_ratio(omega_r, params.R, V)
    return 0.5 * params.rho * params.A * params.R * V * V * params.cp_surface.ctau(lam)


def rotor_power(params: TurbineParams, omega_r: float, V: float) -> float:
    """Aerodynamic rotor power Cp(lambda) * wind_power, W."""
    lam = tip_speed_ratio(omega_r, params.R, V)
    return params.cp_surface.cp(lam) * wind_power(params, V)


def optimal_torque_gain(params: TurbineParams) -> float:
    """Optimal gain K* = pi*rho*R^5*Cp*/(2*lambda*^3) of the K*omega^2 law."""
    s = params.cp_surface
    return math.pi * params.rho * params.R ** 5 * s.cp_star / (2.0 * s.lam_star ** 3)
