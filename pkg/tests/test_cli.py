import json
import math
import subprocess
import sys

import pytest

from secgame.cli import main

WEAK = ["--lam", "10", "--p", "0.01", "--q", "0.1", "--q-plus", "0.5"]
STRONG = ["--lam", "10", "--p", "0.01", "--q", "0", "--q-plus", "0.5"]


def run_cli(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def parse_rows(text):
    lines = [l for l in text.strip().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_invest_gl_emits_grid(tmp_path):
    code, text = run_cli(
        ["invest", "--family", "gl", "--alpha", "1", "--loss", "10",
         "--v-grid", "0:1:0.01"], tmp_path)
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0].startswith("# secgame invest 0.1.0 ")
    assert lines[1] == "v,x_star"
    rows = parse_rows(text)
    assert len(rows) == 101
    xs = [float(r["x_star"]) for r in rows]
    assert xs[0] == 0.0 and xs[-1] == 0.0 and max(xs) > 0.0


def test_invest_rational_monotone(tmp_path):
    code, text = run_cli(
        ["invest", "--family", "rational", "--a", "1", "--b", "2", "--loss", "10"],
        tmp_path)
    assert code == 0
    xs = [float(r["x_star"]) for r in parse_rows(text)]
    assert all(b >= a - 1e-9 for a, b in zip(xs, xs[1:]))


def test_invest_check_1e_columns(tmp_path):
    code, text = run_cli(
        ["invest", "--family", "gl", "--alpha", "1", "--loss", "10",
         "--v-grid", "0.1:0.9:0.1", "--check-1e"], tmp_path)
    assert code == 0
    rows = parse_rows(text)
    assert set(rows[0]) == {"v", "x_star", "ratio", "bound_holds"}
    for r in rows:
        assert float(r["ratio"]) <= 1 / math.e + 1e-9
        assert r["bound_holds"] == "1"


def test_invest_missing_alpha_exits_2(tmp_path):
    code, _ = run_cli(["invest", "--family", "gl", "--loss", "10"], tmp_path)
    assert code == 2


def test_invest_portfolio_csv(tmp_path):
    items = tmp_path / "items.csv"
    items.write_text("cost,s\n0.5,0.6\n1.0,0.3\n")
    code, text = run_cli(
        ["invest", "--family", "portfolio", "--portfolio", str(items),
         "--loss", "10", "--v-grid", "0:1:0.25"], tmp_path)
    assert code == 0
    assert len(parse_rows(text)) == 5


def test_epidemic_strong_h_non_increasing(tmp_path):
    code, text = run_cli(["epidemic"] + STRONG + ["--gamma-grid", "0:1:0.02"], tmp_path)
    assert code == 0
    hs = [float(r["h"]) for r in parse_rows(text)]
    assert all(b <= a + 1e-12 for a, b in zip(hs, hs[1:]))


def test_epidemic_weak_h_single_peaked(tmp_path):
    code, text = run_cli(["epidemic"] + WEAK + ["--gamma-grid", "0:1:0.02"], tmp_path)
    assert code == 0
    hs = [float(r["h"]) for r in parse_rows(text)]
    diffs = [b - a for a, b in zip(hs, hs[1:])]
    signs = [1 if d > 1e-12 else -1 for d in diffs if abs(d) > 1e-12]
    assert signs[0] == 1
    assert sum(1 for a, b in zip(signs, signs[1:]) if a != b) == 1


def test_epidemic_p_zero_all_zero(tmp_path):
    code, text = run_cli(
        ["epidemic", "--lam", "10", "--p", "0", "--q", "0.1", "--q-plus", "0.5",
         "--gamma-grid", "0:1:0.25"], tmp_path)
    assert code == 0
    for r in parse_rows(text):
        assert float(r["p0"]) == 0.0 and float(r["p1"]) == 0.0 and float(r["h"]) == 0.0


def test_equilibrium_sweep_has_three_root_window(tmp_path):
    code, text = run_cli(
        ["equilibrium"] + WEAK + ["--types", "homogeneous:1.0",
                                  "--sweep-c", "0.05:0.6:0.01"], tmp_path)
    assert code == 0
    rows = parse_rows(text)
    three = [r for r in rows if r["stable_flags"] == "101"]
    assert three, "expected a c-interval with stable/unstable/stable equilibria"
    for r in three:
        assert r["gamma_star_low"] == "0"
        assert r["gamma_star_mid"] != "" and r["gamma_star_high"] != ""
        assert r["critical_mass"] == "1"


def test_welfare_sweep_planner_dominates(tmp_path):
    code, text = run_cli(
        ["welfare"] + WEAK + ["--types", "uniform", "--sweep-c", "0.05:0.45:0.1"],
        tmp_path)
    assert code == 0
    rows = parse_rows(text)
    assert rows
    for r in rows:
        assert float(r["gamma_social"]) >= float(r["gamma_market"]) - 1e-6
        assert float(r["loss"]) >= -1e-9


def test_simulate_zero_replications_exits_2(tmp_path):
    code, _ = run_cli(
        ["simulate"] + WEAK + ["--n", "100", "--gamma", "0.5",
                               "--replications", "0", "--seed", "1"], tmp_path)
    assert code == 2


def test_simulate_json_record(tmp_path):
    code, text = run_cli(
        ["simulate"] + WEAK + ["--n", "2000", "--gamma", "0.5",
                               "--replications", "2", "--seed", "9"], tmp_path)
    assert code == 0
    record = json.loads(text)
    assert set(record) == {"config_hash", "gamma", "p0_hat", "p1_hat",
                           "stderr0", "stderr1", "n", "replications"}
    assert 0.0 <= record["p1_hat"] <= record["p0_hat"] <= 1.0


def test_simulate_csv_row(tmp_path):
    code, text = run_cli(
        ["simulate"] + WEAK + ["--n", "1000", "--gamma", "0.5", "--replications", "2",
                               "--seed", "9", "--format", "csv"], tmp_path)
    assert code == 0
    rows = parse_rows(text)
    assert len(rows) == 1
    assert rows[0]["n"] == "1000"


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "command": "epidemic", "lam": 10, "p": 0.01, "q": 0.0, "q_plus": 0.5,
        "gamma_grid": "0:1:0.5",
    }))
    code, text = run_cli(["epidemic", "--config", str(cfg)], tmp_path)
    assert code == 0
    assert len(parse_rows(text)) == 3
    # flag overrides the file value
    code, text = run_cli(
        ["epidemic", "--config", str(cfg), "--gamma-grid", "0:1:0.25"], tmp_path)
    assert len(parse_rows(text)) == 5


def test_config_file_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "epidemic", "lambda": 10}))
    code, _ = run_cli(["epidemic", "--config", str(cfg)], tmp_path)
    assert code == 2


def test_config_file_command_mismatch(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "invest", "family": "gl"}))
    code, _ = run_cli(["epidemic", "--config", str(cfg)], tmp_path)
    assert code == 2


def test_unknown_flag_exits_2(tmp_path, capsys):
    code = main(["epidemic", "--lambda", "10"])
    capsys.readouterr()
    assert code == 2


def test_repeated_runs_byte_identical():
    cmd = [sys.executable, "-m", "secgame", "simulate"] + WEAK + [
        "--n", "2000", "--gamma", "0.5", "--replications", "2", "--seed", "77"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
