import csv
import dataclasses
import math

import numpy as np
import pytest

from escwind import (
    ConfigError,
    DerivConfig,
    EscConfig,
    Scenario,
    convergence_metric,
    optimal_torque_gain,
    run_scenario,
    steady_state,
    write_trace_csv,
)
from escwind.sim import TRACE_HEADER

V = 8.0


def make_scenario(k_init, **overrides):
    base = dict(
        objective="aero",
        wind=V,
        esc=EscConfig(omega_d=0.1, A_d=1.0e5, kappa=0.0),
        duration=600.0,
        k_init=k_init,
        dt=0.2,
        esc_enable_time=100.0,
    )
    base.update(overrides)
    return Scenario(**base)


class TestOpenLoopDynamics:
    def test_settles_to_equilibrium(self, params, k_star):
        # zero adaptation gain and zero dither: pure rotor transient toward
        # the steady state of k_init
        k_init = 0.9 * k_star
        target = steady_state(params, k_init, V)
        scenario = make_scenario(
            k_init,
            esc=EscConfig(omega_d=0.1, A_d=0.0, kappa=0.0),
            omega0=1.1 * target,
            duration=4000.0,
        )
        trace = run_scenario(params, scenario)
        assert trace.omega_r[-1] == pytest.approx(target, rel=1e-6)
        assert np.all(np.diff(trace.omega_r) < 1e-12)  # monotone decay

    def test_energy_balance_over_transient(self, params, k_star):
        # kinetic energy change must equal the integral of P_r - P_g
        k_init = 0.9 * k_star
        target = steady_state(params, k_init, V)
        scenario = make_scenario(
            k_init,
            esc=EscConfig(omega_d=0.1, A_d=0.0, kappa=0.0),
            omega0=1.1 * target,
            duration=400.0,
            dt=0.05,
        )
        trace = run_scenario(params, scenario)
        kinetic = 0.5 * params.I * (trace.omega_r[-1] ** 2 - trace.omega_r[0] ** 2)
        net = np.trapezoid(trace.P_r - trace.P_g, trace.t)
        assert kinetic == pytest.approx(net, rel=1e-3)

    def test_step_size_refinement(self, params, k_star):
        # halving dt changes the terminal integrator state by < 0.1%
        def terminal(dt):
            scenario = make_scenario(
                0.8 * k_star,
                esc=EscConfig(omega_d=0.1, A_d=1.0e5, kappa=2.0e5),
                duration=3000.0,
                dt=dt,
            )
            return run_scenario(params, scenario).K_tilde[-1]

        coarse, fine = terminal(0.2), terminal(0.1)
        assert abs(coarse - fine) / abs(fine) < 1e-3


class TestClosedLoop:
    def test_zero_gain_holds_k_init(self, params, k_star):
        trace = run_scenario(params, make_scenario(0.85 * k_star))
        assert np.all(trace.K_tilde == 0.85 * k_star)
        # the applied command carries the dither on top of the frozen gain
        late = trace.t > 200.0
        assert np.max(trace.K_total[late]) == pytest.approx(0.85 * k_star + 1.0e5, rel=1e-4)

    def test_command_frozen_before_enable_time(self, params, k_star):
        scenario = make_scenario(
            0.8 * k_star,
            esc=EscConfig(omega_d=0.1, A_d=1.0e5, kappa=2.0e5),
            duration=2000.0,
            esc_enable_time=500.0,
        )
        trace = run_scenario(params, scenario)
        before = trace.t < 500.0
        assert np.all(trace.K_tilde[before] == 0.8 * k_star)
        assert trace.K_tilde[-1] != 0.8 * k_star

    def test_objectives_recorded_consistently(self, params, k_star):
        trace = run_scenario(params, make_scenario(0.9 * k_star))
        assert np.array_equal(trace.J, trace.P_r)
        assert trace.P_hat_r is None
        gen = run_scenario(params, make_scenario(0.9 * k_star, objective="generator"))
        assert np.array_equal(gen.J, gen.P_g)
        est = run_scenario(
            params,
            make_scenario(
                0.9 * k_star, objective="estimated", deriv=DerivConfig(T_d=1.0), dt=0.2
            ),
        )
        assert np.array_equal(est.J, est.P_hat_r)

    def test_noise_is_seeded_and_reproducible(self, params, k_star):
        noisy = make_scenario(0.9 * k_star, noise_std=1.0e4, seed=42, duration=200.0)
        a = run_scenario(params, noisy)
        b = run_scenario(params, noisy)
        assert np.array_equal(a.J, b.J)
        c = run_scenario(params, dataclasses.replace(noisy, seed=43))
        assert not np.array_equal(a.J, c.J)
        assert not np.array_equal(a.J, a.P_r)

    def test_decimation_thins_records(self, params, k_star):
        full = run_scenario(params, make_scenario(0.9 * k_star, duration=200.0))
        thin = run_scenario(params, make_scenario(0.9 * k_star, duration=200.0, decimation=5))
        assert thin.t.size == math.ceil(full.t.size / 5)
        assert np.array_equal(thin.omega_r, full.omega_r[::5])


class TestConvergenceMetric:
    def test_constant_trace_statistics(self, params, k_star):
        trace = run_scenario(params, make_scenario(0.9 * k_star))
        metric = convergence_metric(trace, 5.0, k_star)
        assert metric.mean == 0.9 * k_star
        assert metric.spread == 0.0
        assert metric.rel_deviation == pytest.approx(-0.1, rel=1e-12)

    def test_window_longer_than_trace_rejected(self, params, k_star):
        trace = run_scenario(params, make_scenario(0.9 * k_star, duration=200.0))
        with pytest.raises(ConfigError, match="window"):
            convergence_metric(trace, 1000.0, k_star)


class TestScenarioValidation:
    def test_unknown_objective(self, k_star):
        with pytest.raises(ConfigError, match="objective"):
            make_scenario(k_star, objective="profit")

    def test_estimated_requires_deriv(self, k_star):
        with pytest.raises(ConfigError, match="deriv"):
            make_scenario(k_star, objective="estimated")

    def test_estimated_dt_bound(self, k_star):
        with pytest.raises(ConfigError, match="T_d"):
            make_scenario(k_star, objective="estimated", deriv=DerivConfig(T_d=0.1), dt=0.2)

    def test_esc_sampling_bound(self, k_star):
        with pytest.raises(ConfigError, match="sampling"):
            make_scenario(k_star, dt=10.0)

    def test_enable_time_before_end(self, k_star):
        with pytest.raises(ConfigError):
            make_scenario(k_star, duration=50.0, esc_enable_time=100.0)

    def test_positive_quantities(self, k_star):
        with pytest.raises(ConfigError):
            make_scenario(k_star, wind=0.0)
        with pytest.raises(ConfigError):
            make_scenario(-k_star)
        with pytest.raises(ConfigError):
            make_scenario(k_star, decimation=0)


class TestTraceCsv:
    def test_header_and_empty_estimate_column(self, params, k_star, tmp_path):
        trace = run_scenario(params, make_scenario(0.9 * k_star, duration=200.0))
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == TRACE_HEADER
        assert rows[0] == ["t", "omega_r", "K_total", "K_tilde", "P_r", "P_g", "P_hat_r", "J"]
        assert len(rows) == 1 + trace.t.size
        assert all(row[6] == "" for row in rows[1:])
        # full float round-trip
        assert [float(r[1]) for r in rows[1:]] == trace.omega_r.tolist()

    def test_estimated_column_populated(self, params, k_star, tmp_path):
        trace = run_scenario(
            params,
            make_scenario(
                0.9 * k_star, objective="estimated", deriv=DerivConfig(T_d=1.0),
                duration=200.0,
            ),
        )
        path = tmp_path / "trace.csv"
        write_trace_csv(trace, path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert [float(r[6]) for r in rows[1:]] == trace.P_hat_r.tolist()

    def test_writes_are_deterministic(self, params, k_star, tmp_path):
        scenario = make_scenario(0.9 * k_star, duration=200.0)
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            write_trace_csv(run_scenario(params, scenario), p)
        assert paths[0].read_bytes() == paths[1].read_bytes()
