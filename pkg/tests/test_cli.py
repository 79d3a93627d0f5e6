import csv
import io
import math

import numpy as np
import pytest

from escwind import ConfigError, compensation_angle
from escwind.cli import (
    PRESET_NAMES,
    SEED_ENV,
    build_params,
    build_preset,
    build_scenario,
    cmd_presets,
    main,
    parse_config,
    serialize_config,
)
from escwind.cli import Config, ScenarioSpec

MINIMAL_SCENARIO = """
[turbine]
I = 4.0e7

[scenario demo]
objective = aero
omega_d = 0.1
amplitude = 1.0e5
kappa = 2.0e5
k_init_factor = 0.8
duration = 1500.0
dt = 0.2
esc_enable_time = 200.0
decimation = 10
"""


def read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]


class TestConfigParsing:
    def test_roundtrip_all_presets(self):
        for name in PRESET_NAMES:
            config = build_preset(name)
            assert parse_config(serialize_config(config)) == config

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[weather]\nV = 8\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("[turbine]\nmass = 3\n")

    def test_unparseable_value_names_key(self):
        with pytest.raises(ConfigError, match="omega_d"):
            parse_config(MINIMAL_SCENARIO.replace("omega_d = 0.1", "omega_d = fast"))

    def test_case_sensitive_keys(self):
        config = parse_config("[turbine]\nR = 70.0\nI = 1.0e7\n")
        assert config.turbine.R == 70.0
        assert config.turbine.I == 1.0e7


class TestScenarioBuilding:
    def test_k_init_exclusivity(self):
        params = build_params(Config())
        spec = ScenarioSpec(name="x", objective="aero", omega_d=0.1, amplitude=1e5,
                            kappa=2e5, k_init=1e6, k_init_factor=0.7)
        with pytest.raises(ConfigError, match="exactly one"):
            build_scenario(spec, params)
        spec = ScenarioSpec(name="x", objective="aero", omega_d=0.1, amplitude=1e5, kappa=2e5)
        with pytest.raises(ConfigError, match="exactly one"):
            build_scenario(spec, params)

    def test_psi_converted_to_radians(self):
        params = build_params(Config())
        spec = ScenarioSpec(name="x", objective="aero", omega_d=0.1, amplitude=1e5,
                            kappa=2e5, k_init_factor=0.7, psi_deg=-30.0)
        scenario = build_scenario(spec, params)
        assert scenario.esc.psi == pytest.approx(math.radians(-30.0))


class TestPresets:
    def test_exactly_seven(self):
        assert len(PRESET_NAMES) == 7
        for name in PRESET_NAMES:
            assert build_preset(name) is not None

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError, match="unknown preset"):
            build_preset("fig99")

    def test_compensated_run_uses_linear_model_angle(self, params, k_star):
        config = build_preset("fig4a")
        expected = compensation_angle(params, 0.98 * k_star, 8.0, 0.1)
        angles = [sc.psi_deg for sc in config.scenarios]
        assert any(abs(a - expected) < 0.1 for a in angles)
        for psi in (-30.0, 0.0, 30.0):
            assert angles.count(psi) == 2  # one aero, one generator run

    def test_presets_listing_prints_all(self):
        out = io.StringIO()
        cmd_presets(out=out)
        text = out.getvalue()
        for name in PRESET_NAMES:
            assert f"preset {name}:" in text


class TestRunCommand:
    def test_empty_config_writes_summary_only(self, tmp_path):
        cfg = tmp_path / "empty.ini"
        cfg.write_text("[turbine]\nI = 4.0e7\n")
        out = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out / "summary.csv")
        assert header[0] == "scenario"
        assert rows == []
        assert sorted(p.name for p in out.iterdir()) == ["summary.csv"]

    def test_scenario_run_outputs(self, tmp_path):
        cfg = tmp_path / "demo.ini"
        cfg.write_text(MINIMAL_SCENARIO)
        out = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out)]) == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ["demo.csv", "plots.gp", "summary.csv"]
        header, rows = read_csv(out / "demo.csv")
        assert header == ["t", "omega_r", "K_total", "K_tilde", "P_r", "P_g", "P_hat_r", "J"]
        assert len(rows) == 1500 / 0.2 / 10
        _, summary = read_csv(out / "summary.csv")
        assert summary[0][0] == "demo"
        # adaptation should have moved the gain toward K* (k_init was 0.8 K*)
        assert float(summary[0][6]) > -0.2

    def test_run_is_deterministic(self, tmp_path):
        cfg = tmp_path / "demo.ini"
        cfg.write_text(MINIMAL_SCENARIO)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", str(cfg), "--out", str(a)]) == 0
        assert main(["run", str(cfg), "--out", str(b)]) == 0
        assert (a / "demo.csv").read_bytes() == (b / "demo.csv").read_bytes()
        assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()

    def test_seed_env_var_controls_noise(self, tmp_path, monkeypatch):
        cfg = tmp_path / "noisy.ini"
        cfg.write_text(MINIMAL_SCENARIO + "noise_std = 1.0e4\n")
        outs = {}
        for seed in ("1", "1", "2"):
            out = tmp_path / f"out{len(outs)}"
            monkeypatch.setenv(SEED_ENV, seed)
            assert main(["run", str(cfg), "--out", str(out)]) == 0
            outs[len(outs)] = (out / "demo.csv").read_bytes()
        assert outs[0] == outs[1]
        assert outs[0] != outs[2]

    def test_malformed_config_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "broken.ini"
        cfg.write_text("[turbine\nI = 4e7\n")
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 2
        assert "malformed config" in capsys.readouterr().err

    def test_bad_value_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[turbine]\nmass = 3\n")
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 1
        assert "unknown key" in capsys.readouterr().err

    def test_missing_config_exits_1(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "out")]) == 1
        assert "error" in capsys.readouterr().err

    def test_preset_run_by_name(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "fig3", "--out", str(out)]) == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ["aero_psi0.csv", "generator_psi0.csv", "plots.gp", "summary.csv"]


ANALYZE_CONFIG = """
[turbine]
I = 4.0e7

[bode sweep]
k_factors = 1.0
outputs = P_r,P_g
n_points = 50

[zeros locus]
n_points = 41
"""


class TestAnalyzeCommand:
    def test_bode_and_zero_outputs(self, tmp_path):
        cfg = tmp_path / "an.ini"
        cfg.write_text(ANALYZE_CONFIG)
        out = tmp_path / "out"
        assert main(["analyze", str(cfg), "--out", str(out)]) == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ["analysis.gp", "locus_zeros.csv", "sweep_P_g.csv", "sweep_P_r.csv"]

        header, rows = read_csv(out / "sweep_P_r.csv")
        assert header == ["omega", "magnitude_db", "phase_deg", "label"]
        assert len(rows) == 50
        assert rows[0][3] == "P_r@1.0K*"
        # at K* the aerodynamic-power sensitivity vanishes: magnitudes are
        # far below those of the generator output
        mags_r = np.array([float(r[1]) for r in rows])
        _, rows_g = read_csv(out / "sweep_P_g.csv")
        mags_g = np.array([float(r[1]) for r in rows_g])
        assert np.all(mags_r < -200.0)
        assert np.all(mags_g > mags_r + 50.0)

    def test_zero_locus_sign_change_at_optimum(self, tmp_path):
        cfg = tmp_path / "an.ini"
        cfg.write_text(ANALYZE_CONFIG)
        out = tmp_path / "out"
        assert main(["analyze", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out / "locus_zeros.csv")
        assert header == ["k", "k_factor", "zero"]
        assert len(rows) == 41
        factors = np.array([float(r[1]) for r in rows])
        zeros = np.array([float(r[2]) for r in rows])
        flips = np.nonzero(np.sign(zeros[:-1]) != np.sign(zeros[1:]))[0]
        assert flips.size == 1
        assert factors[flips[0]] <= 1.0 <= factors[flips[0] + 1]

    def test_unknown_output_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "an.ini"
        cfg.write_text("[bode x]\noutputs = torque\n")
        assert main(["analyze", str(cfg), "--out", str(tmp_path / "out")]) == 1
        assert "unknown output" in capsys.readouterr().err

    def test_preset_analysis_by_name(self, tmp_path):
        out = tmp_path / "out"
        assert main(["analyze", "fig7", "--out", str(out)]) == 0
        header, rows = read_csv(out / "fig7_P_hat_r.csv")
        assert header == ["omega", "magnitude_db", "phase_deg", "label"]
        assert len(rows) == 5 * 200
        assert {r[3] for r in rows} == {
            f"P_hat_r@{f}K*" for f in (0.96, 0.98, 1.0, 1.02, 1.04)
        }
