import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from slidingheat.cli import main
from slidingheat.config import apply_overrides, dump_config, known_keys, load_config, parse_text
from slidingheat.heat_sim import ConfigError, SimConfig


def write(path, text):
    path.write_text(text)
    return path


def test_parse_text_comments_and_case():
    values = parse_text("gains.K = 3   # inline\n; full line\nc0 = 0.25\n")
    assert values == {"gains.K": "3", "c0": "0.25"}


def test_load_defaults_and_overrides(tmp_path):
    assert load_config() == SimConfig()
    cfg = write(tmp_path / "a.cfg", "dx = 0.05\nz0 = 1, 0, 2\ngains.K = 3\n"
                                    "disturbance.kind = constant\ndisturbance.amplitude = 1.5\n")
    config = load_config(cfg, {"gains.alpha": "3.0"})
    assert config.nx == 21
    assert config.z0.coeffs == (1.0, 0.0, 2.0)
    assert config.gains.K == 3.0 and config.gains.alpha == 3.0 and config.gains.beta == 2.5
    assert config.disturbance.kind == "constant" and config.disturbance.K_d == 1.5


@pytest.mark.parametrize("text, kind", [("zero", "poly"), ("mode:1", "mode"), ("4", "poly")])
def test_z0_forms(text, kind):
    config = apply_overrides(SimConfig(), {"z0": text, "z0.scale": "-2"})
    assert config.z0.kind == kind and config.z0.scale == -2.0


def test_tables(tmp_path):
    write(tmp_path / "z.csv", "x,z\n0,0\n1,2\n")
    write(tmp_path / "d.csv", "0,0\n1,1\n2,0\n")
    cfg = write(tmp_path / "t.cfg", "z0 = table:z.csv\ndisturbance.table = d.csv\n"
                                    "disturbance.kd = 1\ndisturbance.c = 1\n")
    config = load_config(cfg)
    np.testing.assert_allclose(config.z0.sample(config.grid, config.c0), 2 * config.grid.x)
    assert config.disturbance.kind == "table" and config.disturbance(0.5) == 0.5
    assert config.disturbance.C == 1.0


@pytest.mark.parametrize("overrides", [
    {"bogus": "1"}, {"gains.gamma": "1"}, {"dx": "0.3"}, {"nx": "2.5"}, {"dt": ""},
    {"z0": "spline"}, {"disturbance.kind": "table"}, {"law": "pid"}, {"dt": "1e-2"},
])
def test_bad_config_rejected(overrides):
    with pytest.raises(ValueError):
        apply_overrides(SimConfig(), overrides)


def test_dump_round_trip(tmp_path):
    config = apply_overrides(SimConfig(), {"c0": 0.7, "gains.K": 4, "law": "st", "z0": "mode:0",
                                           "reduced.sigma0": -1, "disturbance.phase": 0.3})
    again = load_config(write(tmp_path / "r.cfg", dump_config(config)))
    assert again == config
    assert set(k for k in parse_text(dump_config(config))) <= set(known_keys())


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_eigen(capsys):
    code, out, _ = run_cli(capsys, "eigen", "--c0", "0.5", "--branch", "1", "--header")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "r,lambda,b_star_phi,residual"
    r, lam, b, res = map(float, row.split(","))
    assert r == pytest.approx(3.29231002128, abs=1e-10)
    assert lam == pytest.approx(-10.8393052762, abs=1e-9)
    assert abs(res) < 1e-12


def test_cli_validate_gains(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "validate-gains", "--out-dir", str(tmp_path))
    rows = list(csv.reader(out.strip().splitlines()))
    assert code == 0 and rows[0] == ["law", "condition", "lhs", "rhs", "margin", "pass"]
    assert [r[-1] for r in rows[1:]] == ["true"] * 3
    code, out, _ = run_cli(capsys, "validate-gains", "--K", "2.0")
    assert code == 1 and "false" in out


@pytest.mark.parametrize("cmd", ["simulate-smc", "simulate-st"])
def test_cli_simulate(capsys, tmp_path, cmd):
    cfg = write(tmp_path / "run.cfg", "horizon = 2.5\n")
    code, out, _ = run_cli(capsys, cmd, "--config", str(cfg), "--out-dir", str(tmp_path / "o"))
    assert code == 0
    assert {p.name for p in (tmp_path / "o").iterdir()} == \
        {"trajectory.csv", "field.csv", "metrics.csv", "run.cfg"}
    assert out.splitlines()[0].startswith("t_reach,")
    code, _, _ = run_cli(capsys, cmd, "--horizon", "0.3", "--out-dir", str(tmp_path / "p"),
                         "--no-field")
    assert code == 1  # not reached within the horizon
    assert not (tmp_path / "p" / "field.csv").exists()


def test_cli_simulate_invalid_gains(capsys, tmp_path):
    code, _, err = run_cli(capsys, "simulate-smc", "--K", "1.0", "--out-dir", str(tmp_path))
    assert code == 2 and "error" in err


def test_cli_bad_config(capsys, tmp_path):
    code, _, err = run_cli(capsys, "simulate-smc", "--set", "nope=1", "--out-dir", str(tmp_path))
    assert code == 2 and "nope" in err


@pytest.mark.parametrize("law, header", [("smc", "t,sigma,selection"),
                                         ("st", "t,sigma,w,selection")])
def test_cli_reduced(capsys, tmp_path, law, header):
    code, out, _ = run_cli(capsys, "reduced-ode", "--law", law, "--out-dir", str(tmp_path),
                           "--set", "reduced.sigma0=1", "--stride", "100")
    assert code == 0 and "t_reach=" in out
    lines = (tmp_path / f"reduced_{law}.csv").read_text().splitlines()
    assert lines[0] == header
    assert len(lines) == 1 + 3 * 10**5 // 100 + 1


def test_cli_sweep(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "sweep", "--grid", "gains.K=2.5,3.0", "--horizon", "3",
                           "--out-dir", str(tmp_path))
    assert code == 0
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 3
    code, _, _ = run_cli(capsys, "sweep", "--grid", "gains.K=2.0,2.5", "--out-dir", str(tmp_path))
    assert code == 1


def test_console_script_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "slidingheat.cli", "eigen", "--branch", "0"],
                          capture_output=True, text=True, env=os.environ.copy())
    assert proc.returncode == 0
    assert float(proc.stdout.split(",")[0]) == pytest.approx(0.653271187094, abs=1e-11)
