"""Analytic linearization of the turbine and frequency-domain analysis.

Covers the plain single-state model (outputs: aerodynamic and generator
power), the two-state model augmented with the derivative-filter state
(output: estimated aerodynamic power), rational transfer functions in
closed form, the generator-power zero, and Bode-style frequency responses.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .aero import TurbineParams, tip_speed_ratio
from .errors import ConfigError
from .turbine import steady_state

#: Magnitude floor used when exporting responses, dB.
DB_FLOOR = -300.0


@dataclass(frozen=True)
class LinearModel:
    """State-space matrices (A, B, C, D) at a steady operating point."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    operating_point: tuple[float, float, float]  # (omega_bar, K, V)


@dataclass(frozen=True)
class RationalTf:
    """SISO rational transfer function, coefficients in ascending powers of s."""

    num: tuple[float, ...]
    den: tuple[float, ...]
    label: str

    def __call__(self, s: complex) -> complex:
        n = sum(c * s ** k for k, c in enumerate(self.num))
        d = sum(c * s ** k for k, c in enumerate(self.den))
        return n / d

    def dc_gain(self) -> float:
        return self.num[0] / self.den[0]


def linearize(params: TurbineParams, K: float, V: float) -> LinearModel:
    """Single-state linearization around the equilibrium of (K, V)."""
    omega = steady_state(params, K, V)
    lam = tip_speed_ratio(omega, params.R, V)
    surf = params.cp_surface
    rho, Asw, R, I = params.rho, params.A, params.R, params.I
    a = (0.5 * rho * Asw * R * R * V * surf.dctau_dlam(lam) - 2.0 * K * omega) / I
    b = -omega * omega / I
    c1 = 0.5 * rho * Asw * R * V * V * surf.dcp_dlam(lam)
    c2 = 3.0 * K * omega * omega
    return LinearModel(
        A=np.array([[a]]),
        B=np.array([[b]]),
        C=np.array([[c1], [c2]]),
        D=np.array([[0.0], [omega ** 3]]),
        operating_point=(omega, K, V),
    )


def transfer_functions(model: LinearModel) -> list[RationalTf]:
    """Closed-form transfer functions [P_r(s), P_g(s)] of the plain model.

    Both share the denominator D(s) = I*s - I*a (leading coefficient I).
    """
    if model.A.shape != (1, 1):
        raise ConfigError("transfer_functions expects the plain single-state model")
    omega, K, V = model.operating_point
    a = model.A[0, 0]
    b = model.B[0, 0]
    c1, c2 = model.C[0, 0], model.C[1, 0]
    d2 = model.D[1, 0]
    # I is recoverable from b = -omega^2/I
    I = -omega * omega / b
    den = (-I * a, I)
    tf_r = RationalTf(num=(c1 * b * I,), den=den, label="P_r")
    tf_g = RationalTf(num=(c2 * b * I - d2 * I * a, d2 * I), den=den, label="P_g")
    return [tf_r, tf_g]


def zero_of_pg(tf: RationalTf) -> float:
    """The single s-plane zero of P_g(s); Re < 0 means minimum phase."""
    if len(tf.num) != 2:
        raise ConfigError(f"{tf.label}: expected a first-order numerator")
    n1, n2 = tf.num
    if n2 == 0:
        raise ConfigError("degenerate numerator: leading coefficient is zero")
    return -n1 / n2


def frequency_response(tf: RationalTf, omegas) -> list[tuple[float, float]]:
    """(magnitude, unwrapped phase in degrees) of tf at s = j*omega.

    The phase is unwrapped along the curve and anchored so the value at the
    lowest frequency lies in (-180, 180].
    """
    omegas = np.asarray(omegas, dtype=float)
    resp = np.array([tf(1j * w) for w in omegas])
    mag = np.abs(resp)
    phase = np.unwrap(np.angle(resp))
    wrapped0 = math.remainder(phase[0], 2.0 * math.pi)
    if wrapped0 <= -math.pi:
        wrapped0 += 2.0 * math.pi
    phase = np.degrees(phase - (phase[0] - wrapped0))
    return list(zip(mag.tolist(), phase.tolist()))


def linearize_augmented(
    params: TurbineParams, K: float, V: float, T_d: float, K_d: float = 1.0
) -> LinearModel:
    """Two-state linearization with the derivative-filter state appended.

    State [omega_r, omega_hat_r], output P_hat_r; the filter equilibrium is
    omega_hat_r = K_d * omega_bar.
    """
    if T_d <= 0:
        raise ConfigError("T_d must be positive")
    plain = linearize(params, K, V)
    omega, _, _ = plain.operating_point
    a = plain.A[0, 0]
    b = plain.B[0, 0]
    I = params.I
    omega_hat = K_d * omega
    c1 = I / T_d * (2.0 * K_d * omega - omega_hat) + 3.0 * K * omega * omega
    c2 = -(I / T_d) * omega
    return LinearModel(
        A=np.array([[a, 0.0], [K_d / T_d, -1.0 / T_d]]),
        B=np.array([[b], [0.0]]),
        C=np.array([[c1, c2]]),
        D=np.array([[omega ** 3]]),
        operating_point=plain.operating_point,
    )


def augmented_transfer_function(model: LinearModel) -> RationalTf:
    """Closed-form P_hat_r(s) of the augmented two-state model.

    Denominator I*(s - a)*(s + 1/T_d) in ascending coefficients.
    """
    if model.A.shape != (2, 2):
        raise ConfigError("augmented_transfer_function expects the two-state model")
    a = model.A[0, 0]
    g21 = model.A[1, 0]          # K_d / T_d
    p2 = -model.A[1, 1]          # 1 / T_d
    b = model.B[0, 0]
    c1, c2 = model.C[0, 0], model.C[0, 1]
    d = model.D[0, 0]
    omega, _, _ = model.operating_point
    I = -omega * omega / b
    # den(s) = I*(s - a)*(s + p2)
    den = (-I * a * p2, I * (p2 - a), I)
    # num(s) = d*den(s) + I*b*(c1*(s + p2) + c2*g21)
    num = (
        d * den[0] + I * b * (c1 * p2 + c2 * g21),
        d * den[1] + I * b * c1,
        d * den[2],
    )
    return RationalTf(num=num, den=den, label="P_hat_r")


def compensation_angle(
    params: TurbineParams,
    K: float,
    V: float,
    omega_d: float,
    omega_H: float | None = None,
) -> float:
    """Demodulation phase (deg) compensating plant plus high-pass filter lag
    at the dither frequency, from the aerodynamic-power transfer function."""
    if omega_H is None:
        omega_H = omega_d / 5.0
    tf_r, _ = transfer_functions(linearize(params, K, V))
    s = 1j * omega_d
    h = s / (s + omega_H)
    angle = math.degrees(np.angle(tf_r(s) * h))
    return math.remainder(angle, 360.0)


def bode_export(responses, path) -> None:
    """Write curves to CSV with columns omega,magnitude_db,phase_deg,label.

    ``responses`` is an iterable of (label, omegas, points) with ``points``
    as returned by frequency_response.  Magnitudes are clamped at -300 dB.
    """
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["omega", "magnitude_db", "phase_deg", "label"])
        for label, omegas, points in responses:
            for omega, (mag, phase) in zip(omegas, points):
                db = DB_FLOOR if mag <= 0 else max(20.0 * math.log10(mag), DB_FLOOR)
                w.writerow([repr(float(omega)), repr(float(db)), repr(float(phase)), label])
