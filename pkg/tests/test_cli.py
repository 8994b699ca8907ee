import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from hybridslide.cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    RunSpec,
    UsageError,
    main,
    parse_config_text,
    parse_run_spec,
)


def test_parse_published_values():
    spec = parse_run_spec(["--model", "stickslip2", "--set", "k=0.88", "--set", "Fc1=0.01996", "--t-end", "120"])
    assert spec.model == "stickslip2"
    assert spec.params == {"k": 0.88, "Fc1": 0.01996}
    assert spec.config().t_end == 120.0


@pytest.mark.parametrize("argv, token", [
    ([], "stickslip2"),
    (["--model", "stickslip2", "--set", "bogus=1"], "bogus"),
    (["--model", "nope"], "nope"),
    (["--model", "belt3", "--t-end", "soon"], "soon"),
    (["--model", "belt3", "--frobnicate"], "--frobnicate"),
    (["--model", "belt3", "--set", "t_end=3"], "t_end"),
    (["--model", "belt3", "--set", "amp"], "amp"),
])
def test_usage_errors_name_the_token(argv, token):
    with pytest.raises(UsageError, match=token):
        parse_run_spec(argv)


def test_main_usage_exit(capsys):
    assert main([]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "stickslip2" in err and "belt3" in err


def test_config_roundtrip(tmp_path):
    spec = RunSpec("belt3", params={"amp": 0.5, "x0": (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)},
                   sim={"t_end": 12.5, "adaptive": False, "max_newton": 7},
                   trace="a.csv", plot_vars=("v_m1", "v_m2"), seed=3)
    path = tmp_path / "run.cfg"
    path.write_text("# comment line\n" + spec.to_config_text())
    back = parse_run_spec(["--config", str(path)])
    assert back == spec


def test_flags_override_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("model = belt3\nt_end = 50\namp = 2.0\n")
    spec = parse_run_spec(["--config", str(path), "--t-end", "5", "--set", "amp=0.1"])
    assert spec.sim["t_end"] == 5.0 and spec.params["amp"] == 0.1


def test_config_text_errors():
    assert parse_config_text("a = 1 # trailing\n\n b=2") == {"a": "1", "b": "2"}
    with pytest.raises(UsageError, match="line 1"):
        parse_config_text("just words")
    with pytest.raises(UsageError):
        parse_run_spec(["--config", "/nonexistent/run.cfg"])


def test_zero_horizon_run(tmp_path):
    tr, ev = tmp_path / "t.csv", tmp_path / "e.json"
    assert main(["--model", "belt3", "--t-end", "0", "--trace", str(tr), "--events", str(ev)]) == EXIT_OK
    rows = list(csv.reader(tr.open()))
    assert len(rows) == 2 and float(rows[1][0]) == 0.0
    assert json.loads(ev.read_text()) == []


def test_bad_plot_variable_stops_before_simulation(tmp_path, capsys):
    out = tmp_path / "t.csv"
    rc = main(["--model", "belt3", "--plot", str(tmp_path / "p.svg"), "--plot-vars", "v_m1,speed", "--trace", str(out)])
    assert rc == EXIT_USAGE
    assert "speed" in capsys.readouterr().err
    assert not out.exists()


def test_unwritable_output(tmp_path):
    assert main(["--model", "belt3", "--t-end", "1", "--trace", str(tmp_path / "no" / "t.csv")]) == EXIT_USAGE


def test_numeric_failure_keeps_partial_output(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("model = belt3\nt_end = 10\nmax_steps = 5\n")
    out = tmp_path / "t.csv"
    assert main(["--config", str(cfg), "--trace", str(out)]) == EXIT_NUMERIC
    assert 2 <= len(out.read_text().splitlines()) <= 7


@pytest.fixture(scope="module")
def stickslip_run(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    paths = {k: d / f"run.{k}" for k in ("csv", "json", "svg")}
    rc = main(["--model", "stickslip2", "--t-end", "120", "--trace", str(paths["csv"]),
               "--events", str(paths["json"]), "--plot", str(paths["svg"]), "--plot-vars", "v_m,v_M1,v_M2"])
    return rc, paths


def test_stickslip_run_outputs(stickslip_run):
    rc, paths = stickslip_run
    assert rc == EXIT_OK
    events = json.loads(paths["json"].read_text())
    kinds = {e["kind"] for e in events}
    assert {"SlidingEntry", "SlidingExit"} <= kinds
    with paths["csv"].open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x_m", "v_m", "x_M1", "v_M1", "x_M2", "v_M2", "regime"]
    t = np.array([float(r[0]) for r in rows[1:]])
    assert t[0] == 0.0 and t[-1] == 120.0 and np.all(np.diff(t) > 0)
    svg = paths["svg"].read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 3 and "v_M2" in svg


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hybridslide", "--model", "belt3", "--t-end", "0"],
                         capture_output=True, text=True)
    assert res.returncode == 0
