import csv
import io
import json
import math

import numpy as np
import pytest

from residualdep.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_pairs(path, x, y, header="a,b"):
    lines = [header] + [f"{float(xi)!r},{float(yi)!r}" for xi, yi in zip(x, y)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def uniform_csv(tmp_path):
    rng = np.random.default_rng(1001)
    return write_pairs(tmp_path / "u.csv", rng.random(2000), rng.random(2000))


def parse_estimate_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestSimulateCommand:
    def test_end_to_end_and_flagging(self, tmp_path, capsys):
        config = {
            "model": {"family": "frank", "theta": 0.5},
            "n": 100, "N": 5, "q_grid": [1.0], "k_grid": [10],
            "margins": ["pareto_t", "frechet_shifted"],
            "second_order": {"mode": "oracle"},
            "master_seed": 3,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        out = tmp_path / "cells.csv"
        code, _, err = run_cli(capsys, "simulate", "--config", str(cfg_path),
                               "--out", str(out))
        assert code == 0 and err == ""
        rows = parse_estimate_csv(out.read_text())
        assert {r["estimator"] for r in rows} == {"raw", "reduced"}

    def test_seed_override_changes_output(self, tmp_path, capsys):
        config = {
            "model": {"family": "frank", "theta": 0.5},
            "n": 100, "N": 3, "q_grid": [1.0], "k_grid": [10],
            "margins": ["pareto_t"], "master_seed": 3,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        run_cli(capsys, "simulate", "--config", str(cfg_path), "--out", str(a))
        run_cli(capsys, "simulate", "--config", str(cfg_path), "--out", str(b))
        run_cli(capsys, "simulate", "--config", str(cfg_path), "--out", str(c),
                "--seed", "999")
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()


class TestEstimateCommand:
    def test_comonotone_eta_near_one(self, tmp_path, capsys):
        x = np.linspace(1.0, 100.0, 1000)
        path = write_pairs(tmp_path / "co.csv", x, 2 * x + 1)
        code, out, _ = run_cli(
            capsys, "estimate", "--data", path, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--q", "1", "--k-max", "0.06",
        )
        assert code == 0
        rows = parse_estimate_csv(out)
        at_small_k = [float(r["eta"]) for r in rows if int(r["k"]) == 50]
        assert 0.85 <= at_small_k[0] <= 1.1

    def test_independent_uniforms_near_half(self, uniform_csv, capsys):
        code, out, _ = run_cli(
            capsys, "estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--q", "1", "--k-max", "0.05",
        )
        assert code == 0
        rows = parse_estimate_csv(out)
        hill_k100 = [float(r["eta"]) for r in rows
                     if int(r["k"]) == 100 and r["q"] == "1"]
        assert 0.35 <= hill_k100[0] <= 0.65

    def test_hill_always_included(self, uniform_csv, capsys):
        code, out, _ = run_cli(
            capsys, "estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--q", "0.5,1.5", "--k-max", "0.02",
        )
        rows = parse_estimate_csv(out)
        assert {r["q"] for r in rows} == {"0.5", "1", "1.5"}
        assert all(r["margin"] == "frechet_shifted" for r in rows)
        assert all(r["reduced"] == "false" for r in rows)

    def test_ci_fields_empty_when_unavailable(self, uniform_csv, capsys):
        # q = 1.9 -> a ~ 0.47; with eta ~ 1 at tiny k the variance domain
        # a*eta < 1/2 can fail; such rows keep empty CI fields
        code, out, _ = run_cli(
            capsys, "estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--q", "1.9", "--k-max", "0.01",
        )
        assert code == 0
        rows = parse_estimate_csv(out)
        assert rows, "rows expected"
        for r in rows:
            assert (r["ci_low"] == "") == (r["ci_high"] == "")
            if r["ci_low"]:
                assert float(r["ci_low"]) <= float(r["eta"]) <= float(r["ci_high"])

    def test_reduce_bias_rows(self, uniform_csv, capsys):
        code, out, _ = run_cli(
            capsys, "estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--q", "1", "--k-max", "0.05",
            "--reduce-bias", "--tau", "0.5", "--beta", "0.0", "--kstar", "sqrtk",
        )
        assert code == 0
        rows = parse_estimate_csv(out)
        reduced = [r for r in rows if r["reduced"] == "true"]
        raw = [r for r in rows if r["reduced"] == "false"]
        assert reduced and raw
        for rr, rw in zip(reduced, raw):
            assert float(rr["eta"]) <= float(rw["eta"])  # beta >= 0 direction

    def test_estimated_second_order_used_when_no_tau(self, uniform_csv, capsys):
        code, out, _ = run_cli(
            capsys, "estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--q", "1", "--k-max", "0.02",
            "--reduce-bias",
        )
        assert code == 0
        assert any(r["reduced"] == "true" for r in parse_estimate_csv(out))

    def test_byte_identical_runs(self, uniform_csv, tmp_path, capsys):
        args = ("estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
                "--dry", "0", "--quantile", "0", "--q", "0.8,1", "--k-max", "0.03")
        out1 = tmp_path / "r1.csv"
        out2 = tmp_path / "r2.csv"
        run_cli(capsys, *args, "--out", str(out1))
        run_cli(capsys, *args, "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_file_exit_3(self, capsys):
        code, _, err = run_cli(capsys, "estimate", "--data", "/no/such.csv",
                               "--x", "a", "--y", "b")
        assert code == 3 and "error" in err

    def test_tau_without_beta_exit_4(self, uniform_csv, capsys):
        code, _, err = run_cli(
            capsys, "estimate", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--reduce-bias", "--tau", "0.5",
        )
        assert code == 4 and "together" in err

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["estimate", "--data"])
        assert exc.value.code == 2


class TestSecondOrderCommand:
    def test_reports_tau_beta(self, uniform_csv, capsys):
        code, out, _ = run_cli(
            capsys, "second-order", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0",
        )
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "tau_hat,beta_hat,k0,n"
        tau, beta, k0, n = row.split(",")
        assert float(tau) > 0 and int(n) == 2000
        assert int(k0) == int(2000 ** 0.999)

    def test_k0_flag(self, uniform_csv, capsys):
        code, out, _ = run_cli(
            capsys, "second-order", "--data", uniform_csv, "--x", "a", "--y", "b",
            "--dry", "0", "--quantile", "0", "--k0", "500",
        )
        assert code == 0
        assert out.strip().split("\n")[1].split(",")[2] == "500"


class TestOracleCommand:
    def test_identities_hold(self, capsys):
        for n, seed in ((20, 1), (77, 12345), (100, 9)):
            code, out, _ = run_cli(capsys, "oracle", "--n", str(n), "--seed", str(seed))
            assert code == 0
            assert "ok joint-exceedance identity" in out
            assert "ok power-mean kernel vs naive loop" in out
            assert "FAIL" not in out

    def test_oversized_n_exit_4(self, capsys):
        code, _, err = run_cli(capsys, "oracle", "--n", "5000", "--seed", "1")
        assert code == 4
