import argparse
import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sizewinding import records
from sizewinding.cli import ExperimentConfig, main, parse_bool, parse_float, parse_grid, run
from sizewinding.errors import MalformedInputError

# parsers


@pytest.mark.parametrize(
    "text, value",
    [("pi", np.pi), ("2pi", 2 * np.pi), ("-pi/2", -np.pi / 2), ("0.5*pi", 0.5 * np.pi), ("1e-3", 1e-3), ("3", 3.0)],
)
def test_parse_float_accepts_pi_multiples(text, value):
    assert parse_float(text) == pytest.approx(value, rel=1e-15)


def test_parse_float_rejects_garbage():
    with pytest.raises(argparse.ArgumentTypeError):
        parse_float("pie")


def test_parse_grid_range_is_stop_inclusive():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("1, 2,pi") == [1.0, 2.0, np.pi]
    assert parse_grid([1, "pi"]) == [1.0, np.pi]


@pytest.mark.parametrize("text", ["0:1", "1:0:0.1", "0:1:0", "0:1:-1"])
def test_parse_grid_rejects_bad_ranges(text):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid(text)


def test_parse_bool():
    assert parse_bool("yes") is True and parse_bool("0") is False
    with pytest.raises(argparse.ArgumentTypeError):
        parse_bool("maybe")


# config validation


def test_config_fills_defaults_and_parses_values():
    cfg = ExperimentConfig("bulk", {"Delta": "0.5", "t_grid": "1:2:1"})
    assert cfg.params["Delta"] == 0.5 and cfg.params["t_grid"] == [1.0, 2.0]
    assert cfg.params["beta"] == pytest.approx(2 * np.pi)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"command": "nope"},
        {"command": "bulk", "params": {"bogus": 1}},
        {"command": "bulk", "params": {"Delta": "x"}},
        {"command": "bulk", "seed": -1},
        {"command": "bulk", "seed": 1 << 64},
        {"command": "bulk", "workers": 0},
        {"command": "bulk", "format": "xml"},
    ],
)
def test_config_rejects_malformed_input(kwargs):
    with pytest.raises(MalformedInputError):
        ExperimentConfig(**kwargs)


# records


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_format_float_round_trips(x):
    assert float(records.format_float(x)) == x


def test_format_float_non_finite():
    assert records.format_float(math.nan) == "nan"
    assert records.format_float(-math.inf) == "-inf"


def test_to_jsonable_handles_numpy_and_complex():
    obj = {1: np.array([1.5, np.nan]), "z": 1 + 2j, "b": np.bool_(True), "k": np.int64(3)}
    out = records.to_jsonable(obj)
    assert out == {"1": [1.5, None], "z": {"re": 1.0, "im": 2.0}, "b": True, "k": 3}
    json.dumps(out)


def test_table_rejects_ragged_columns():
    with pytest.raises(ValueError):
        records.Table(grid={"t": [1, 2]}, values={"v": [1.0]})


def test_csv_layout():
    table = records.Table(grid={"t": [0.1, 2]}, values={"v": [1 / 3, True]}, stderr={"v": [0.5, 0.25]})
    rows = list(csv.reader(io.StringIO(records.csv_text(table))))
    assert rows[0] == ["t", "v", "stderr_v"]
    assert rows[1] == ["0.10000000000000001", "0.33333333333333331", "0.5"]
    assert rows[2] == ["2", "1", "0.25"]


def test_json_record_fields(tmp_path):
    table = records.Table(grid={"t": [1.0]}, values={"v": [2.0]}, meta={"flag": True})
    path = tmp_path / "out.json"
    records.write_json(path, table, {"command": "x", "params": {"a": 1}}, timestamp="T")
    rec = json.loads(path.read_text())
    assert set(rec) == {"config", "version", "timestamp", "params", "grid", "values", "stderr", "meta"}
    assert rec["params"] == {"a": 1} and rec["timestamp"] == "T" and rec["version"] == records.code_version()


# end to end


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_stdout_csv_by_default(capsys):
    code, out, _ = _run(["pauli-check", "--n", "2"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["check"] for r in rows} >= {"group_law", "commutation"}
    assert all(r["failures"] == "0" for r in rows)


def test_seeded_runs_are_byte_identical(capsys):
    argv = ["--seed", "17", "transfer", "--n", "3", "--samples", "4", "--t", "1"]
    first = _run(argv, capsys)[1]
    second = _run(argv, capsys)[1]
    other = _run(["--seed", "18"] + argv[2:], capsys)[1]
    assert first == second
    assert first != other


def test_results_do_not_depend_on_worker_count(capsys):
    argv = ["transfer", "--n", "3", "--samples", "6", "--t", "1", "--g", "1,pi"]
    one = _run(["--seed", "3", "--workers", "1"] + argv, capsys)[1]
    two = _run(["--seed", "3", "--workers", "2"] + argv, capsys)[1]
    assert one == two


def test_json_output_identical_modulo_timestamp(tmp_path, capsys):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    for p in paths:
        assert _run(["--seed", "5", "--output", str(p), "bulk", "--t-grid", "7,8"], capsys)[0] == 0
    recs = [json.loads(p.read_text()) for p in paths]
    assert all(r["config"]["format"] == "json" for r in recs)
    for r in recs:
        r.pop("timestamp")
        r["config"].pop("output")
    assert recs[0] == recs[1]


def test_config_file_and_command_line_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "bulk", "params": {"t_grid": [7, 8, 9]}, "seed": 1}))
    code, out, _ = _run(["--config", str(cfg), "bulk", "--t-grid", "7"], capsys)
    assert code == 0
    assert len(out.strip().splitlines()) == 2


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "bulk", "sede": 1}))
    code, _, err = _run(["--config", str(cfg)], capsys)
    assert code == 2
    assert "sede" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["bulk", "--bogus", "1"],
        ["bulk", "--Delta", "-1"],
        ["bulk", "--t-grid", "1:0:1"],
        ["--seed", "-3", "bulk"],
        ["pauli-check", "--n", "-1"],
        ["chain", "--n", "4", "--m", "1.5"],
        ["chain", "--n", "4", "--m", "0"],
        ["brownian", "--n", "4", "--oracle-trials", "-1"],
        [],
    ],
)
def test_invalid_input_exits_2(argv, capsys):
    assert _run(argv, capsys)[0] == 2


def test_numeric_failure_exits_1_with_diagnostic(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, stdout, err = _run(["--output", str(out), "syk", "--betaJ", "1", "--t-grid", "30"], capsys)
    assert code == 1 and stdout == ""
    diag = json.loads(err)
    assert diag["error"]["type"] == "SaturationError"
    assert diag["config"]["params"]["betaJ"] == 1.0
    assert json.loads((tmp_path / "s.csv.error.json").read_text()) == diag
    assert not out.exists()


def test_run_returns_exit_code_without_argv():
    out, err = io.StringIO(), io.StringIO()
    assert run(ExperimentConfig("bulk", {"t_grid": [7.0]}), out, err) == 0
    assert out.getvalue().startswith("t,")
