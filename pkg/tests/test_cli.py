import json

import numpy as np
import pytest

from aitest import __version__
from aitest.cli import main, read_config
from aitest.data import ColumnRoles, load_csv
from aitest.errors import ConfigError


@pytest.fixture
def simulated(tmp_path):
    out = tmp_path / "t2.csv"
    assert main(["simulate", "--scenario", "table2", "--dist", "uniform", "--n", "1000",
                 "--seed", "7", "--out", str(out)]) == 0
    return out


def test_simulate_writes_csv_and_metadata(simulated):
    assert simulated.read_text().splitlines()[0] == "Z1,Z2,X,Y"
    meta = dict(line.split("=", 1) for line in (simulated.parent / "t2.csv.meta").read_text().splitlines())
    assert meta["seed"] == "7" and meta["n"] == "1000"
    assert meta["label.Z1"] == "InvalidExogeneity" and meta["label.Z2"] == "Valid"
    d = load_csv(simulated, ColumnRoles("X", "Y", ("Z1", "Z2")))
    assert d.n == 1000


def test_simulate_is_reproducible(tmp_path, simulated):
    again = tmp_path / "again.csv"
    main(["simulate", "--scenario", "table2", "--dist", "uniform", "--n", "1000",
          "--seed", "7", "--out", str(again)])
    assert again.read_bytes() == simulated.read_bytes()


@pytest.mark.parametrize("argv", [
    ["simulate", "--scenario", "table9", "--n", "500", "--seed", "1", "--out", "x.csv"],
    ["simulate", "--scenario", "table2", "--n", "10", "--seed", "1", "--out", "x.csv"],
    ["simulate", "--scenario", "table2", "--fn", "quadratic", "--n", "500", "--seed", "1", "--out", "x.csv"],
    ["bench", "--replicates", "0"],
    ["bench", "--jobs", "0"],
    ["test", "--data", "x.csv", "--x", "X", "--z", "Z"],
    ["test", "--data", "missing.csv", "--x", "X", "--y", "Y", "--z", "Z"],
    ["frobnicate"],
])
def test_usage_and_input_errors_exit_2(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_test_command_text_output(simulated, capsys):
    rc = main(["test", "--data", str(simulated), "--x", "X", "--y", "Y", "--z", "Z1", "--z", "Z2",
               "--effect", "constant"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "candidate Z1" in out and "candidate Z2" in out and "p-value" in out


def test_test_command_json_output(simulated, capsys):
    rc = main(["test", "--data", str(simulated), "--x", "X", "--y", "Y", "--z", "Z2",
               "--alpha", "0.05", "--json"])
    assert rc == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["candidate"] == "Z2" and rec["alpha"] == 0.05 and rec["n"] == 1000
    assert 0 < rec["p_value"] <= 1
    assert rec["estimator"] == "ControlFunction" and len(rec["x_coefficients"]) == 2


def test_invalid_alpha_flag(simulated):
    assert main(["test", "--data", str(simulated), "--x", "X", "--y", "Y", "--z", "Z2",
                 "--alpha", "0.9"]) == 2


def test_constant_instrument_exits_3(tmp_path, capsys):
    rng = np.random.default_rng(0)
    x = rng.normal(size=100)
    p = tmp_path / "c.csv"
    p.write_text("x,y,z\n" + "".join(f"{float(a)!r},{float(2 * a + b)!r},1.0\n" for a, b in zip(x, rng.normal(size=100))))
    assert main(["test", "--data", str(p), "--x", "x", "--y", "y", "--z", "z"]) == 3
    assert "error" in capsys.readouterr().err


def test_config_file_supplies_defaults_and_flags_win(tmp_path, simulated, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# defaults\nalpha = 0.2\njson = true\nz = Z2\n")
    base = ["--config", str(cfg), "test", "--data", str(simulated), "--x", "X", "--y", "Y"]
    assert main(base) == 0
    assert json.loads(capsys.readouterr().out)["alpha"] == 0.2
    assert main(base + ["--alpha", "0.01"]) == 0
    assert json.loads(capsys.readouterr().out)["alpha"] == 0.01


def test_read_config_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("alpha 0.2\n")
    with pytest.raises(ConfigError, match="bad.conf:1"):
        read_config(str(bad))
    with pytest.raises(ConfigError):
        read_config(str(tmp_path / "nope.conf"))


def test_bench_writes_table_and_log(tmp_path):
    out, log = tmp_path / "t.tsv", tmp_path / "r.log"
    assert main(["bench", "--replicates", "1", "--sizes", "200", "--seed", "1",
                 "--out", str(out), "--log", str(log), "--format", "markdown"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("| Scenario |") and len(lines) == 2 + 9
    assert log.read_text().startswith("scenario\tn\tseed")


def test_version(capsys):
    with pytest.raises(SystemExit):
        from aitest.cli import build_parser
        build_parser().parse_args(["--version"])
    assert __version__ in capsys.readouterr().out
