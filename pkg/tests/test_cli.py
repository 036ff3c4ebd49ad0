import csv
import io
import json
import math

import pytest

from bribelab import AttackParams, build_value_table
from bribelab.cli import (
    case_study_report,
    main,
    simulate_rows,
    sweep_rows,
    value_table_rows,
)


@pytest.fixture
def config_path(tmp_path):
    doc = {"T": 30, "l0": 4, "gamma": 0.1, "g_def": 0.3, "phi": 25.0, "seed": 11}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestCaseStudy:
    def test_report_values(self):
        rep = case_study_report("bitcoin-a")
        assert rep["supercritical"]
        assert rep["failure_probability"] < 1e-12
        assert 400 <= rep["expected_per_block_cost_R"] <= 460
        assert rep["expected_total_cost_R"] <= 1942
        assert rep["budish_cost_R"] == 160500.0
        assert rep["budish_cost_BTC"] > 1.0e6
        assert rep["stopping_time_bound_blocks"] == pytest.approx(750.0)

    def test_second_preset(self):
        rep = case_study_report("bitcoin-b")
        assert rep["success_probability"] >= 1 - 1e-7
        assert rep["expected_total_cost_R"] == pytest.approx(206.9, rel=0.05)

    def test_cli_json_output(self, capsys):
        assert main(["--format", "json", "case-study", "bitcoin-b"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["preset"] == "bitcoin-b"
        assert rep["worst_case_total_R"] <= 131200

    def test_unknown_preset_exits_1(self, capsys):
        assert main(["case-study", "no-such-chain"]) == 1
        assert "no-such-chain" in capsys.readouterr().err


class TestSweep:
    def test_row_count_and_validity(self):
        rows = sweep_rows("T", [100, 200, 300], {"T": 2500, "l0": 150,
                                                 "gamma": 0.05, "g_def": 0.4,
                                                 "phi": 158000.0})
        assert len(rows) == 3
        assert all(r["params_valid"] for r in rows)
        assert [r["T"] for r in rows] == [100, 200, 300]

    def test_exact_below_valid_bounds(self):
        rows = sweep_rows("T", [300, 400, 500], {"T": 0, "l0": 10, "gamma": 0.05,
                                                 "g_def": 0.4, "phi": 100.0})
        for r in rows:
            if r["thm5_valid"]:
                assert r["expected_total_cost"] <= r["thm5_bound"]
            if r["thm4_valid"]:
                assert r["worst_case_cost"] <= r["thm4_bound"]

    def test_invalid_point_flagged_not_fatal(self):
        rows = sweep_rows("gamma", [0.05, 0.0], {"T": 10, "l0": 2, "gamma": 0.05,
                                                 "g_def": 0.3, "phi": 10.0})
        assert rows[0]["params_valid"] and not rows[1]["params_valid"]
        assert rows[1]["success_probability"] is None

    def test_cli_csv_grid(self, capsys):
        code = main(["sweep", "--vary", "T", "--from", "200", "--to", "400",
                     "--step", "100"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 4  # header + 3 rows
        header = lines[0].split(",")
        assert header[0] == "T"
        assert "expected_total_cost" in header

    def test_csv_floats_round_trip(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--vary", "T", "--from", "300", "--to", "500",
                     "--step", "100", "--out-csv", str(out)])
        assert code == 0
        text = out.read_text()
        assert "\r" not in text
        rows = sweep_rows("T", [300, 400, 500], {"T": 2500, "l0": 150,
                                                 "gamma": 0.05, "g_def": 0.4,
                                                 "phi": 158000.0})
        parsed = list(csv.DictReader(io.StringIO(text)))
        for got, want in zip(parsed, rows):
            assert float(got["expected_total_cost"]) == want["expected_total_cost"]
            assert float(got["worst_case_cost"]) == want["worst_case_cost"]

    def test_svg_output(self, tmp_path):
        pytest.importorskip("matplotlib")
        svg = tmp_path / "sweep.svg"
        code = main(["sweep", "--vary", "T", "--from", "200", "--to", "400",
                     "--step", "100", "--out-svg", str(svg)])
        assert code == 0
        assert svg.read_text().lstrip().startswith("<?xml")

    def test_bad_parameter_exits_1(self, capsys):
        assert main(["sweep", "--vary", "bogus", "--from", "1", "--to", "2",
                     "--step", "1"]) == 1


class TestBoundsCommand:
    def test_json_output(self, config_path, capsys):
        code = main(["--config", config_path, "--format", "json", "bounds"])
        assert code == 0
        pairs = json.loads(capsys.readouterr().out)
        assert pairs["supercritical"] is True
        assert pairs["budish_cost_R"] == 30 + 25.0
        assert pairs["thm4_valid"] and pairs["thm5_valid"]

    def test_requires_config(self, capsys):
        assert main(["bounds"]) == 1
        assert "--config" in capsys.readouterr().err


class TestValueTable:
    def test_toy_rows(self):
        p = AttackParams(horizon_T=2, initial_gap_l0=1, gamma=0.05, g_def=0.4,
                         phi=10.0)
        rows = {(r["t"], r["l"]): r for r in value_table_rows(p)}
        assert rows[(1, 1)]["wmax_over_phi_gamma_R"] == pytest.approx(0.45)
        assert rows[(0, 1)]["payout_over_phi_gamma_R"] == pytest.approx(1.0)
        assert rows[(0, 2)]["payout_over_phi_gamma_R"] == pytest.approx(0.55)
        assert rows[(1, 2)]["payout_over_phi_gamma_R"] == 0.0
        assert rows[(2, 1)]["payout_over_phi_gamma_R"] == ""  # no payout at t = T
        assert rows[(1, 0)]["wmax_over_phi_gamma_R"] == 0.0

    def test_cli_csv_round_trip(self, tmp_path):
        doc = {"T": 2, "l0": 1, "gamma": 0.05, "g_def": 0.4, "phi": 10.0}
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(doc))
        out = tmp_path / "table.csv"
        assert main(["--config", str(cfg), "value-table", "--out", str(out)]) == 0
        parsed = list(csv.DictReader(out.read_text().splitlines()))
        p = AttackParams(horizon_T=2, initial_gap_l0=1, gamma=0.05, g_def=0.4,
                         phi=10.0)
        tab = build_value_table(p)
        assert len(parsed) == 3 * (tab.width + 1)
        for row in parsed:
            t, l = int(row["t"]), int(row["l"])
            assert float(row["wmax_over_phi_gamma_R"]) == tab.wmax[t, l] / p.phi_gamma_R


class TestSimulate:
    def test_rows_are_consistent(self, config_path):
        from bribelab import parse_config

        cfg = parse_config(config_path)
        rows = simulate_rows(cfg.params, cfg.population, n_trials=40, seed=cfg.seed)
        assert len(rows) == 40
        for r in rows:
            assert r["outcome"] in ("success", "failure")
            assert r["total_cost"] == r["per_block_cost"] + r["corruption_cost"]
            assert r["per_block_cost"] == r["attack_blocks"] * 1.0
            if r["outcome"] == "failure":
                assert r["duration"] == cfg.params.horizon_T

    def test_cli_csv_and_determinism(self, config_path, tmp_path, capsys):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        base = ["--config", config_path, "simulate", "--trials", "25"]
        assert main(base + ["--out", str(out1)]) == 0
        assert main(base + ["--out", str(out2)]) == 0
        assert out1.read_text() == out2.read_text()
        rows = list(csv.DictReader(out1.read_text().splitlines()))
        assert len(rows) == 25
        assert rows[0]["trial"] == "0"

    def test_seed_flag_overrides_config(self, config_path, capsys):
        base = ["--config", config_path, "--format", "json", "simulate",
                "--trials", "10"]
        assert main(base + ["--seed", "1"]) == 0
        first = capsys.readouterr().out
        assert main(base + ["--seed", "2"]) == 0
        second = capsys.readouterr().out
        assert first != second

    def test_unwritable_output_exits_2(self, config_path, capsys):
        code = main(["--config", config_path, "simulate", "--trials", "2",
                     "--out", "/nonexistent-dir/x.csv"])
        assert code == 2


class TestEquilibriumCommand:
    def test_pass_verdict(self, config_path, capsys):
        assert main(["--config", config_path, "--format", "json", "equilibrium"]) == 0
        pairs = json.loads(capsys.readouterr().out)
        assert pairs["result"] == "PASS"
        assert pairs["pivotal_check"] is True
        assert abs(pairs["max_violation"]) <= pairs["tolerance"]
        assert math.isclose(max(pairs["power_grid"]), 0.1)


class TestErrorHandling:
    def test_malformed_config_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["--config", str(bad), "bounds"]) == 1
        assert "error" in capsys.readouterr().err

    def test_invalid_domain_config_exits_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"T": 0, "l0": 1, "gamma": 0.1, "g_def": 0.1,
                                   "phi": 1.0}))
        assert main(["--config", str(bad), "bounds"]) == 1
