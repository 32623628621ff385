"""Config parsing, validation reporting, and the command-line surface."""

import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

import nonlocal_fv as nf
from nonlocal_fv import cli
from nonlocal_fv.config import make_datafn, parse_config
from nonlocal_fv.errors import BoundViolation, ConfigSemantic, ConfigSyntax

from conftest import reference_config


def small_config(**over):
    cfg = reference_config(25)
    cfg["T"] = 0.1
    cfg.update(over)
    return cfg


def write_config(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


# parsing ---------------------------------------------------------------


def test_parse_roundtrip():
    cfg = parse_config(small_config())
    again = parse_config(cfg.to_dict())
    assert again == cfg


def test_parse_json_string_and_file(tmp_path):
    raw = small_config()
    from_dict = parse_config(raw)
    from_string = parse_config(json.dumps(raw))
    from_file = parse_config(write_config(tmp_path, raw))
    assert from_string == from_dict
    # File parsing pins base_dir to the config's directory.
    assert from_file.base_dir == str(tmp_path)
    assert from_file.to_dict()["domain"] == from_dict.to_dict()["domain"]


def test_syntax_errors_accumulate():
    with pytest.raises(ConfigSyntax) as exc:
        parse_config({"domain": [0.0], "kernel": {"name": "triweight"}})
    text = str(exc.value)
    # Every missing or malformed field is reported in a single pass.
    for field in ("domain", "N", "T", "kernel.h", "flux.name",
                  "data.initial", "data.left", "data.right"):
        assert field in text, field


def test_semantic_errors_accumulate():
    cfg = small_config()
    cfg["domain"] = {"a": 1.0, "b": 0.0}
    cfg["N"] = -3
    cfg["kernel"]["name"] = "gaussian"
    with pytest.raises(ConfigSemantic) as exc:
        parse_config(cfg)
    text = str(exc.value)
    assert "domain" in text and "N" in text and "kernel.name" in text


def test_unparseable_json_is_syntax_error():
    with pytest.raises(ConfigSyntax):
        parse_config("{not json")


def test_csv_data_kind(tmp_path):
    table = tmp_path / "trace.csv"
    table.write_text("t,value\n0.0,0.2\n1.0,0.6\n")
    cfg = small_config()
    cfg["data"]["left"] = {"kind": "csv", "path": "trace.csv"}
    parsed = parse_config(write_config(tmp_path, cfg))
    fn = make_datafn(parsed.left, (0.0, parsed.horizon), parsed.base_dir)
    assert fn(np.array([0.5]))[0] == pytest.approx(0.4)
    assert fn(np.array([0.0]))[0] == pytest.approx(0.2)


def test_csv_requires_two_columns(tmp_path):
    table = tmp_path / "bad.csv"
    table.write_text("t,a,b\n0.0,1.0,2.0\n0.5,1.0,2.0\n")
    with pytest.raises(ConfigSemantic):
        make_datafn({"kind": "csv", "path": str(table)}, (0.0, 1.0))
    with pytest.raises(ConfigSemantic):
        make_datafn({"kind": "csv", "path": str(tmp_path / "absent.csv")}, (0.0, 1.0))


# command line ----------------------------------------------------------


def test_cli_solve_outputs(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", cfg_path, "--out", str(out)]) == 0
    for name in ("solution.csv", "interfaces.csv", "diagnostics.csv", "constants.json"):
        assert (out / name).exists(), name
    with open(out / "diagnostics.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert header == cli.DIAG_COLUMNS
    with open(out / "solution.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "rho"]
    # 17 significant digits survive a write-read round trip.
    assert float(rows[1][2]) == 0.8
    constants = json.loads((out / "constants.json").read_text())
    for key in ("C1", "linf_bound", "tv_bound", "alpha", "t"):
        assert key in constants, key


def test_cli_bounds_and_entropy(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "o1"
    assert cli.main(["bounds", "--config", cfg_path, "--out", str(out)]) == 0
    assert (out / "constants.json").exists()
    out2 = tmp_path / "o2"
    assert cli.main(["entropy-check", "--config", cfg_path, "--out", str(out2)]) == 0


def test_cli_convergence(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "conv"
    code = cli.main(["convergence", "--config", cfg_path,
                     "--levels", "25,50", "--out", str(out)])
    assert code == 0
    with open(out / "convergence.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["N", "dx", "l1_error", "order"]
    assert len(rows) == 3


def test_cli_stability(tmp_path):
    cfg_path = write_config(tmp_path, small_config())
    out = tmp_path / "stab"
    code = cli.main(["stability", "--config", cfg_path,
                     "--perturb", "eps=1e-3,target=initial", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "stability.json").read_text())
    assert report["data_distance"] == pytest.approx(1e-3)


def test_cli_config_error_exit(tmp_path):
    cfg = small_config()
    del cfg["flux"]
    assert cli.main(["solve", "--config", write_config(tmp_path, cfg)]) == 3
    assert cli.main(["solve", "--config", str(tmp_path / "missing.json")]) == 3


def test_cli_admissibility_exit(tmp_path):
    # One-sided kernel never covers the window on a bounded domain.
    cfg = small_config()
    cfg["kernel"] = {"name": "lookahead", "h": 0.2}
    assert cli.main(["solve", "--config", write_config(tmp_path, cfg)]) == 4


def test_cli_bound_violation_exit(tmp_path, monkeypatch):
    def explode(*a, **k):
        raise BoundViolation("forced")

    monkeypatch.setattr(cli, "solve", explode)
    cfg_path = write_config(tmp_path, small_config())
    assert cli.main(["solve", "--config", cfg_path]) == 2


def test_cli_out_dir_from_config(tmp_path, monkeypatch):
    cfg = small_config()
    cfg["out_dir"] = "fromcfg"
    cfg_path = write_config(tmp_path, cfg)
    monkeypatch.chdir(tmp_path)
    assert cli.main(["bounds", "--config", cfg_path]) == 0
    assert (tmp_path / "fromcfg" / "constants.json").exists()


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "nonlocal_fv.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("solve", "bounds", "convergence", "stability", "entropy-check"):
        assert sub in proc.stdout


def test_sanitize_nonfinite():
    blob = cli._sanitize({"a": float("inf"), "b": np.float64(2.0),
                          "c": np.arange(3), "d": [float("nan")]})
    assert blob["a"] == "inf"
    assert blob["b"] == 2.0
    assert blob["c"] == [0, 1, 2]
    assert blob["d"] == ["nan"]
