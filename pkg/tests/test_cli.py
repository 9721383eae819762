"""Tests for the command-line front end: unit conversions, sweeps, the
validation report, config handling and exit codes."""

import csv
import dataclasses
import io
import json
import math

import numpy as np
import pytest

from relayqos import cli
from relayqos.allocator import allocate
from relayqos.cli import (
    ConfigError,
    RadioProfile,
    bits_per_second_to_nats_per_frame,
    ccdf_table,
    main,
    nats_per_frame_to_bits_per_second,
    sweep,
    to_scenario,
    transmission_time,
    validate,
    write_sweep_csv,
)
from relayqos.qsim import SimConfig, StabilityError


class TestUnitConversions:
    def test_100_kbps_at_2ms(self):
        # 1e5 bits/s * ln 2 * 0.002 s = 138.629... nats/frame
        nats = bits_per_second_to_nats_per_frame(1e5, 2e-3)
        assert nats == pytest.approx(138.62943611198906, rel=1e-14)

    def test_round_trip_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            rate = float(10.0 ** rng.uniform(2.0, 8.0))
            t_f = float(10.0 ** rng.uniform(-4.0, -1.0))
            back = nats_per_frame_to_bits_per_second(
                bits_per_second_to_nats_per_frame(rate, t_f), t_f)
            assert back == pytest.approx(rate, rel=1e-12)


class TestToScenario:
    def test_defaults_follow_reference_setup(self):
        scenario = to_scenario(RadioProfile())
        assert scenario.traffic_load == pytest.approx(138.62943611198906)
        assert scenario.delay_bound == 125.0  # 250 ms at 2 ms frames
        assert scenario.hop1_mean_gain == 1.0
        assert scenario.hop2_mean_gain == 1.0
        # duplex=full halves the per-link transmission time
        assert scenario.bt_product == pytest.approx(100.0)

    def test_mean_gain_power_law(self):
        profile = RadioProfile(d1=25.0, d2=75.0)
        scenario = to_scenario(profile)
        assert scenario.hop1_mean_gain == pytest.approx(8.0)  # (0.5)^-3
        assert scenario.hop2_mean_gain == pytest.approx(1.5 ** -3)

    def test_duplex_mapping_and_override(self):
        assert to_scenario(RadioProfile(duplex="half")).bt_product == pytest.approx(200.0)
        assert to_scenario(RadioProfile(duplex="full")).bt_product == pytest.approx(100.0)
        forced = RadioProfile(duplex="full", transmission_time=2e-3)
        assert to_scenario(forced).bt_product == pytest.approx(200.0)
        assert transmission_time(forced) == 2e-3

    def test_delay_bound_rounding(self):
        assert to_scenario(RadioProfile(delay_bound=0.1)).delay_bound == 50.0
        assert to_scenario(RadioProfile(delay_bound=0.0031)).delay_bound == 2.0
        with pytest.raises(ConfigError):
            to_scenario(RadioProfile(delay_bound=0.0005))

    def test_profile_validation(self):
        with pytest.raises(ConfigError):
            RadioProfile(duplex="simplex")
        with pytest.raises(ConfigError):
            RadioProfile(path_loss_exponent=1.5)
        with pytest.raises(ConfigError):
            RadioProfile(violation_prob=0.0)
        with pytest.raises(ConfigError):
            RadioProfile(d1=-10.0)


FAST = RadioProfile(delay_bound=0.1, violation_prob=1e-2,
                    transmission_time=2e-3)


class TestSweep:
    def test_rows_ordered_and_feasible(self):
        rows = sweep(FAST, "delay_bound", [0.2, 0.05, 0.1])
        assert [r.axis_value for r in rows] == [0.05, 0.1, 0.2]
        assert all(r.feasible for r in rows)
        totals = [r.total_power for r in rows]
        assert totals[0] > totals[1] > totals[2]

    def test_rows_copy_allocation_values(self):
        rows = sweep(FAST, "traffic_load", [5e4, 1e5])
        for row in rows:
            profile = dataclasses.replace(FAST, traffic_load=row.axis_value)
            allocation = allocate(to_scenario(profile))
            assert row.kappa1 == allocation.kappa1
            assert row.kappa2 == allocation.kappa2
            assert row.theta1 == allocation.theta1
            assert row.kappa1_db == pytest.approx(10 * math.log10(allocation.kappa1))

    def test_d1_sweep_moves_relay_along_line(self):
        rows = sweep(FAST, "d1", [30.0, 50.0, 70.0])
        assert all(r.feasible for r in rows)
        # asymmetric gains change both hops' powers
        assert rows[0].kappa1 < rows[-1].kappa1
        assert rows[0].kappa2 > rows[-1].kappa2

    def test_infeasible_points_reported_not_raised(self):
        rows = sweep(FAST, "traffic_load", [1e5, 1e9])
        assert rows[0].feasible
        assert not rows[1].feasible
        assert rows[1].error != ""
        assert math.isnan(rows[1].kappa1)

    def test_deterministic(self):
        grid = list(np.geomspace(1e-4, 1e-1, 5))
        first = io.StringIO()
        second = io.StringIO()
        write_sweep_csv(sweep(FAST, "violation_prob", grid), first)
        write_sweep_csv(sweep(FAST, "violation_prob", grid), second)
        assert first.getvalue() == second.getvalue()

    def test_rejects_unknown_axis(self):
        with pytest.raises(ConfigError):
            sweep(FAST, "bandwidth", [1e5])


class TestValidate:
    def test_report_contents_and_determinism(self):
        cfg = SimConfig(n_frames=200_000, warmup_frames=5_000, seed=21)
        report = validate(FAST, cfg)
        again = validate(FAST, cfg)
        assert report.to_text() == again.to_text()
        assert report.analytic_violation == pytest.approx(1e-2, rel=1e-6)
        assert 0.0 <= report.empirical_violation <= 1.0
        text = report.to_text()
        assert "empirical_violation" in text
        assert "residual_load" in text

    def test_different_seed_changes_report(self):
        report_a = validate(FAST, SimConfig(n_frames=100_000, seed=1))
        report_b = validate(FAST, SimConfig(n_frames=100_000, seed=2))
        assert report_a.to_text() != report_b.to_text()


class TestCcdfTable:
    def test_monotone_and_anchored(self):
        rows = ccdf_table(FAST, [0.0, 10.0, 25.0, 50.0])
        assert rows[0][1] == 1.0 and rows[0][2] == 1.0
        e2e = [r[2] for r in rows]
        assert all(a > b for a, b in zip(e2e, e2e[1:]))
        # the curve hits the target at the bound (50 frames)
        assert e2e[-1] == pytest.approx(1e-2, rel=1e-6)
        # two-hop tail dominates the single hop
        assert all(r[2] >= r[1] for r in rows)


class TestMain:
    def test_allocate_command(self, tmp_path):
        out = tmp_path / "alloc.csv"
        code = main(["allocate", "--delay_bound", "0.1",
                     "--violation_prob", "1e-2", "--transmission_time", "2e-3",
                     "--out", str(out)])
        assert code == 0
        rows = dict(csv.reader(out.read_text().splitlines()[1:]))
        allocation = allocate(to_scenario(FAST))
        assert float(rows["kappa1"]) == allocation.kappa1
        assert float(rows["kappa2"]) == allocation.kappa2
        assert float(rows["residual_load"]) <= 1e-9

    def test_sweep_command_with_config(self, tmp_path):
        config = tmp_path / "profile.json"
        config.write_text(json.dumps({
            "delay_bound": 0.1, "violation_prob": 1e-2,
            "transmission_time": 2e-3}))
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--config", str(config), "--axis", "d1",
                     "--grid", "30:70:3", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("axis,axis_value,feasible")
        assert len(lines) == 4

    def test_sweep_log_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--delay_bound", "0.1", "--transmission_time",
                     "2e-3", "--axis", "violation_prob",
                     "--grid", "1e-6:1e-1:6:log", "--out", str(out)])
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        values = [float(r["axis_value"]) for r in rows]
        assert values[0] == pytest.approx(1e-6)
        assert values[-1] == pytest.approx(1e-1)

    def test_validate_command_byte_identical(self, tmp_path):
        args = ["validate", "--delay_bound", "0.1", "--violation_prob", "1e-2",
                "--transmission_time", "2e-3", "--frames", "100000",
                "--warmup", "2000", "--seed", "13"]
        out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_ccdf_command(self, tmp_path):
        out = tmp_path / "ccdf.csv"
        code = main(["ccdf", "--delay_bound", "0.1", "--violation_prob", "1e-2",
                     "--grid", "0:100:11", "--out", str(out)])
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 11
        assert float(rows[0]["two_hop_ccdf"]) == 1.0

    def test_exit_code_infeasible(self, capsys):
        code = main(["allocate", "--traffic_load", "1e9",
                     "--delay_bound", "0.1", "--violation_prob", "1e-6"])
        assert code == 1
        assert "infeasible" in capsys.readouterr().err

    def test_exit_code_invalid_config(self, tmp_path, capsys):
        assert main(["allocate", "--duplex", "simplex"]) == 2
        assert main(["sweep", "--axis", "d1", "--grid", "oops"]) == 2
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"no_such_field": 1.0}))
        assert main(["allocate", "--config", str(config)]) == 2
        assert main(["allocate", "--delay_bound", "0.0001"]) == 2

    def test_exit_code_instability(self, monkeypatch, capsys):
        def boom(profile, cfg):
            raise StabilityError("forced")
        monkeypatch.setattr(cli, "validate", boom)
        code = main(["validate", "--frames", "1000", "--warmup", "0"])
        assert code == 3
        assert "unstable" in capsys.readouterr().err
