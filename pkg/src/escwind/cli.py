"""Command-line front end: INI scenario configs, presets, CSV emission.

Subcommands:
  run <config|preset> --out DIR      simulate scenarios, write traces + summary
  analyze <config|preset> --out DIR  write Bode sweep and zero-locus CSVs
  presets                            list built-in presets and their parameters

A config is an INI file with a [turbine] section plus any number of
[scenario NAME], [bode NAME] and [zeros NAME] sections.  Unknown sections or
keys are rejected.  The env var ESCWIND_SEED seeds optional measurement noise.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .aero import CpSurface, TurbineParams, optimal_torque_gain
from .errors import ConfigError, EscwindError
from .esc import EscConfig
from .linear import (
    augmented_transfer_function,
    bode_export,
    compensation_angle,
    frequency_response,
    linearize,
    linearize_augmented,
    transfer_functions,
    zero_of_pg,
)
from .sim import DerivConfig, Scenario, convergence_metric, run_scenario, write_trace_csv

SEED_ENV = "ESCWIND_SEED"


@dataclass(frozen=True)
class TurbineSpec:
    rho: float = 1.225
    R: float = 63.0
    I: float = 4.0e7
    beta: float = 0.0
    cp_csv: str | None = None


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    objective: str
    omega_d: float
    amplitude: float
    kappa: float
    wind: float = 8.0
    psi_deg: float = 0.0
    duration: float = 5000.0
    dt: float = 0.01
    esc_enable_time: float = 1000.0
    k_init: float | None = None         # absolute, N m/(rad/s)^2
    k_init_factor: float | None = None  # relative to K*
    t_d: float | None = None
    k_d: float = 1.0
    omega_hp: float | None = None
    omega_lp: float | None = None
    decimation: int = 1
    noise_std: float = 0.0


@dataclass(frozen=True)
class BodeSpec:
    name: str
    k_factors: tuple[float, ...] = (0.96, 0.98, 1.0, 1.02, 1.04)
    outputs: tuple[str, ...] = ("P_r", "P_g")
    wind: float = 8.0
    omega_min: float = 1.0e-6
    omega_max: float = 1.0e2
    n_points: int = 200
    t_d: float = 1.0e-2
    k_d: float = 1.0


@dataclass(frozen=True)
class ZeroSpec:
    name: str
    wind: float = 8.0
    k_min_factor: float = 0.9
    k_max_factor: float = 1.1
    n_points: int = 81


@dataclass(frozen=True)
class Config:
    turbine: TurbineSpec = field(default_factory=TurbineSpec)
    scenarios: tuple[ScenarioSpec, ...] = ()
    bodes: tuple[BodeSpec, ...] = ()
    zeros: tuple[ZeroSpec, ...] = ()


# ---------------------------------------------------------------- parsing

_OPTIONAL_FLOATS = {"cp_csv", "k_init", "k_init_factor", "t_d", "omega_hp", "omega_lp"}


def _coerce(spec_cls, section: str, raw: dict[str, str]):
    kwargs = {}
    valid = {f.name: f for f in fields(spec_cls) if f.name != "name"}
    for key, value in raw.items():
        if key not in valid:
            raise ConfigError(f"[{section}]: unknown key {key!r}")
        kwargs[key] = _parse_value(spec_cls, key, value, section)
    return kwargs


def _parse_value(spec_cls, key: str, value: str, section: str):
    value = value.strip()
    try:
        if key in ("objective", "cp_csv"):
            return value
        if key in ("k_factors",):
            return tuple(float(v) for v in value.split(","))
        if key in ("outputs",):
            return tuple(v.strip() for v in value.split(","))
        if key in ("n_points", "decimation"):
            return int(value)
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {value!r}") from exc


def parse_config(text: str) -> Config:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    turbine = TurbineSpec()
    scenarios, bodes, zeros = [], [], []
    for section in cp.sections():
        raw = dict(cp.items(section))
        if section == "turbine":
            turbine = TurbineSpec(**_coerce(TurbineSpec, section, raw))
        elif section.startswith("scenario "):
            name = section.split(" ", 1)[1]
            scenarios.append(ScenarioSpec(name=name, **_coerce(ScenarioSpec, section, raw)))
        elif section.startswith("bode "):
            name = section.split(" ", 1)[1]
            bodes.append(BodeSpec(name=name, **_coerce(BodeSpec, section, raw)))
        elif section.startswith("zeros "):
            name = section.split(" ", 1)[1]
            zeros.append(ZeroSpec(name=name, **_coerce(ZeroSpec, section, raw)))
        else:
            raise ConfigError(f"unknown section [{section}]")
    return Config(turbine=turbine, scenarios=tuple(scenarios), bodes=tuple(bodes), zeros=tuple(zeros))


def load_config(path) -> Config:
    with open(path) as f:
        return parse_config(f.read())


def serialize_config(config: Config) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str

    def put(section: str, spec) -> None:
        cp.add_section(section)
        for f in fields(spec):
            if f.name == "name":
                continue
            value = getattr(spec, f.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            else:
                value = repr(value) if isinstance(value, float) else str(value)
            cp.set(section, f.name, value)

    put("turbine", config.turbine)
    for sc in config.scenarios:
        put(f"scenario {sc.name}", sc)
    for bd in config.bodes:
        put(f"bode {bd.name}", bd)
    for zs in config.zeros:
        put(f"zeros {zs.name}", zs)
    out = io.StringIO()
    cp.write(out)
    return out.getvalue()


# ---------------------------------------------------------------- building

def build_params(config: Config) -> TurbineParams:
    t = config.turbine
    surface = CpSurface.from_csv(t.cp_csv) if t.cp_csv else CpSurface.nrel5mw()
    return TurbineParams(rho=t.rho, R=t.R, I=t.I, beta=t.beta, cp_surface=surface)


def build_scenario(spec: ScenarioSpec, params: TurbineParams, seed: int = 0) -> Scenario:
    if (spec.k_init is None) == (spec.k_init_factor is None):
        raise ConfigError(f"scenario {spec.name}: set exactly one of k_init / k_init_factor")
    k_init = spec.k_init if spec.k_init is not None else spec.k_init_factor * optimal_torque_gain(params)
    esc = EscConfig(
        omega_d=spec.omega_d,
        A_d=spec.amplitude,
        psi=math.radians(spec.psi_deg),
        kappa=spec.kappa,
        omega_H=spec.omega_hp,
        omega_L=spec.omega_lp,
    )
    deriv = DerivConfig(T_d=spec.t_d, K_d=spec.k_d) if spec.t_d is not None else None
    return Scenario(
        objective=spec.objective,
        wind=spec.wind,
        esc=esc,
        duration=spec.duration,
        k_init=k_init,
        dt=spec.dt,
        esc_enable_time=spec.esc_enable_time,
        deriv=deriv,
        decimation=spec.decimation,
        noise_std=spec.noise_std,
        seed=seed,
    )


# ---------------------------------------------------------------- commands

def cmd_run(config: Config, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    params = build_params(config)
    k_star = optimal_torque_gain(params)
    seed = int(os.environ.get(SEED_ENV, "0"))
    rows = []
    for spec in config.scenarios:
        scenario = build_scenario(spec, params, seed=seed)
        trace = run_scenario(params, scenario)
        write_trace_csv(trace, os.path.join(out_dir, f"{spec.name}.csv"))
        period = 2.0 * math.pi / scenario.esc.omega_d
        available = (trace.t[-1] - trace.t[0]) / period
        metric = convergence_metric(trace, min(20.0, available), k_star)
        rows.append(
            [
                spec.name,
                spec.objective,
                repr(spec.omega_d),
                repr(spec.psi_deg),
                repr(k_star),
                repr(metric.mean),
                repr(metric.rel_deviation),
                repr(metric.spread),
            ]
        )
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(
            ["scenario", "objective", "omega_d", "psi_deg", "k_star", "mean_k_tilde", "rel_deviation", "spread"]
        )
        w.writerows(rows)
    if config.scenarios:
        _write_trace_gnuplot(config, out_dir)


def cmd_analyze(config: Config, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    params = build_params(config)
    k_star = optimal_torque_gain(params)
    for spec in config.bodes:
        omegas = np.logspace(math.log10(spec.omega_min), math.log10(spec.omega_max), spec.n_points)
        for output in spec.outputs:
            curves = []
            for factor in spec.k_factors:
                K = factor * k_star
                if output == "P_hat_r":
                    tf = augmented_transfer_function(
                        linearize_augmented(params, K, spec.wind, spec.t_d, spec.k_d)
                    )
                elif output in ("P_r", "P_g"):
                    tf_r, tf_g = transfer_functions(linearize(params, K, spec.wind))
                    tf = tf_r if output == "P_r" else tf_g
                else:
                    raise ConfigError(f"bode {spec.name}: unknown output {output!r}")
                curves.append((f"{output}@{factor}K*", omegas, frequency_response(tf, omegas)))
            bode_export(curves, os.path.join(out_dir, f"{spec.name}_{output}.csv"))
    for spec in config.zeros:
        factors = np.linspace(spec.k_min_factor, spec.k_max_factor, spec.n_points)
        with open(os.path.join(out_dir, f"{spec.name}_zeros.csv"), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["k", "k_factor", "zero"])
            for factor in factors:
                K = float(factor) * k_star
                zero = zero_of_pg(transfer_functions(linearize(params, K, spec.wind))[1])
                w.writerow([repr(K), repr(float(factor)), repr(float(zero))])
    if config.bodes or config.zeros:
        _write_analysis_gnuplot(config, out_dir)


def cmd_presets(out=sys.stdout) -> None:
    for name in PRESET_NAMES:
        config = build_preset(name)
        print(f"preset {name}:", file=out)
        text = serialize_config(config)
        for line in text.rstrip().splitlines():
            print(f"  {line}", file=out)
        print(file=out)


def _write_trace_gnuplot(config: Config, out_dir) -> None:
    lines = [
        "set datafile separator ','",
        "set xlabel 'time [s]'",
        "set ylabel 'torque gain [Nm/(rad/s)^2]'",
        "set key outside",
    ]
    plots = ", ".join(
        f"'{spec.name}.csv' using 1:4 with lines title '{spec.name}'" for spec in config.scenarios
    )
    lines.append(f"plot {plots}")
    with open(os.path.join(out_dir, "plots.gp"), "w") as f:
        f.write("\n".join(lines) + "\n")


def _write_analysis_gnuplot(config: Config, out_dir) -> None:
    lines = [
        "set datafile separator ','",
        "set logscale x",
        "set xlabel 'frequency [rad/s]'",
        "set ylabel 'phase [deg]'",
        "set key outside",
    ]
    for spec in config.bodes:
        for output in spec.outputs:
            lines.append(f"# {spec.name}_{output}.csv: omega,magnitude_db,phase_deg,label")
            lines.append(f"plot '{spec.name}_{output}.csv' using 1:3 with lines title '{output}'")
            lines.append("pause -1")
    with open(os.path.join(out_dir, "analysis.gp"), "w") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------- presets

PRESET_NAMES = ("fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8")

_COMMON = dict(omega_d=0.1, amplitude=1.0e5, wind=8.0, k_init_factor=0.7, esc_enable_time=1000.0)


def build_preset(name: str) -> Config:
    """Built-in experiment configurations.

    Dither frequency, amplitude, wind speed, derivative filter settings and
    (for fig8) the integrator gain and initial condition are the published
    values; integrator gains of the problem-illustration runs, step sizes,
    durations and the inertia default are calibration defaults.
    """
    if name == "fig3":
        scenarios = [
            ScenarioSpec(name=f"{obj}_psi0", objective=obj, psi_deg=0.0, kappa=2.0e5,
                         duration=5000.0, dt=0.2, decimation=5, **_COMMON)
            for obj in ("aero", "generator")
        ]
        return Config(scenarios=tuple(scenarios))
    if name == "fig4a":
        psi_comp = _default_compensation_angle()
        scenarios = [
            ScenarioSpec(name=f"aero_psi{_fmt(psi_comp)}", objective="aero", psi_deg=psi_comp,
                         kappa=2.0e5, duration=5000.0, dt=0.2, decimation=5, **_COMMON)
        ]
        for obj in ("aero", "generator"):
            for psi in (-30.0, 0.0, 30.0):
                scenarios.append(
                    ScenarioSpec(name=f"{obj}_psi{_fmt(psi)}", objective=obj, psi_deg=psi,
                                 kappa=2.0e5, duration=5000.0, dt=0.2, decimation=5, **_COMMON)
                )
        return Config(scenarios=tuple(scenarios))
    if name == "fig4b":
        common = dict(_COMMON, omega_d=0.01)
        scenarios = [
            ScenarioSpec(name=f"{obj}_psi{_fmt(psi)}", objective=obj, psi_deg=psi,
                         kappa=4.0e4, duration=20000.0, dt=0.5, decimation=4, **common)
            for obj in ("aero", "generator")
            for psi in (-30.0, 0.0, 30.0)
        ]
        return Config(scenarios=tuple(scenarios))
    if name == "fig5":
        return Config(zeros=(ZeroSpec(name="fig5"),))
    if name == "fig6":
        return Config(bodes=(BodeSpec(name="fig6", outputs=("P_r", "P_g")),))
    if name == "fig7":
        return Config(bodes=(BodeSpec(name="fig7", outputs=("P_hat_r",), t_d=1.0e-2, k_d=1.0),))
    if name == "fig8":
        scenarios = [
            ScenarioSpec(name=f"estimated_psi{_fmt(psi)}", objective="estimated", psi_deg=psi,
                         kappa=4.0e4, duration=12000.0, dt=0.005, decimation=200,
                         t_d=1.0e-2, k_d=1.0, **_COMMON)
            for psi in (-30.0, 0.0, 30.0)
        ]
        return Config(scenarios=tuple(scenarios))
    raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


def _fmt(psi: float) -> str:
    return f"{psi:+.4g}".replace("+", "p").replace("-", "m").replace(".", "_")


def _default_compensation_angle() -> float:
    params = build_params(Config())
    k_star = optimal_torque_gain(params)
    return round(compensation_angle(params, 0.98 * k_star, 8.0, 0.1), 1)


# ---------------------------------------------------------------- entry point

def _resolve_config(arg: str) -> Config:
    if arg in PRESET_NAMES:
        return build_preset(arg)
    return load_config(arg)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="escwind", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="simulate scenarios from a config or preset")
    p_run.add_argument("config")
    p_run.add_argument("--out", required=True)
    p_an = sub.add_parser("analyze", help="frequency-domain analysis from a config or preset")
    p_an.add_argument("config")
    p_an.add_argument("--out", required=True)
    sub.add_parser("presets", help="list built-in presets")
    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            cmd_presets()
        elif args.command == "run":
            cmd_run(_resolve_config(args.config), args.out)
        else:
            cmd_analyze(_resolve_config(args.config), args.out)
    except configparser.Error as exc:
        print(f"error: malformed config: {exc}", file=sys.stderr)
        return 2
    except (EscwindError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
