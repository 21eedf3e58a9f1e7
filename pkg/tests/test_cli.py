"""End-to-end tests of the CLI (and through it the HTTP service).

Every subcommand runs in-process against temporary JSON configs; exit codes
follow the documented contract (0 ok, 2 config, 3 precondition, 4 internal).
"""

import csv
import io
import json

import pytest
from click.testing import CliRunner

from ratile.cli import main

EXAMPLE_2D = {"matrix": [["2", "1"], ["0", "5/3"]]}
EXAMPLE_1D = {"matrix": [["3/2"]]}
DEGENERATE = {"matrix": [["2", "1/2"], ["0", "3"]]}


@pytest.fixture()
def runner():
    return CliRunner()


def _config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_analyze_example(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_2D)
    result = runner.invoke(main, ["analyze", cfg])
    assert result.exit_code == 0
    out = json.loads(result.stdout)
    assert out["a"] == 10 and out["b"] == 3
    assert out["det"] == "10/3"
    assert out["m"] == 3
    assert len(out["residues"]["A"]) == 10
    assert len(out["residues"]["B"]) == 3


def test_analyze_reports_digit_classification(runner, tmp_path):
    digits = [[str(i), str(y)] for i in (0, 1) for y in (0, 1, 2, 3, 9)]
    cfg = _config(tmp_path, dict(EXAMPLE_2D, digits=digits))
    result = runner.invoke(main, ["analyze", cfg])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["standard"] is True
    nonstd = [[str(i), str(y)] for i in (0, 2) for y in (0, 1, 2, 3, 9)]
    cfg = _config(tmp_path, dict(EXAMPLE_2D, digits=nonstd))
    result = runner.invoke(main, ["analyze", cfg])
    assert json.loads(result.stdout)["standard"] is False


def test_analyze_degenerate_warns_but_succeeds(runner, tmp_path):
    cfg = _config(tmp_path, DEGENERATE)
    result = runner.invoke(main, ["analyze", cfg])
    assert result.exit_code == 0
    assert "b = 1" in result.stderr
    out = json.loads(result.stdout)
    assert out["b"] == 1 and "residues" not in out


def test_bad_config_exits_2(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert runner.invoke(main, ["analyze", str(path)]).exit_code == 2
    cfg = _config(tmp_path, {"matrix": [["1", "2"]]})          # not square
    assert runner.invoke(main, ["analyze", cfg]).exit_code == 2
    cfg = _config(tmp_path, {"matrix": [["x"]]})               # bad rational
    assert runner.invoke(main, ["analyze", cfg]).exit_code == 2
    cfg = _config(tmp_path, {"digits": []})                    # no matrix
    assert runner.invoke(main, ["analyze", cfg]).exit_code == 2


def test_non_expanding_exits_3(runner, tmp_path):
    cfg = _config(tmp_path, {"matrix": [["1"]]})
    result = runner.invoke(main, ["analyze", cfg])
    assert result.exit_code == 3


def test_residues_sides(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["residues", cfg, "--side", "B"])
    assert result.exit_code == 0
    out = json.loads(result.stdout)
    assert out["count"] == 2
    assert sorted(tuple(v) for v in out["representatives"]) == [(0,), (1,)]
    result = runner.invoke(main, ["residues", cfg, "--side", "A"])
    assert json.loads(result.stdout)["count"] == 3


def test_residues_degenerate_exits_3(runner, tmp_path):
    cfg = _config(tmp_path, DEGENERATE)
    result = runner.invoke(main, ["residues", cfg, "--side", "B"])
    assert result.exit_code == 3


def test_expand_integer_vector(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["expand", cfg, "4"])
    assert result.exit_code == 0
    out = json.loads(result.stdout)
    assert out["status"] in ("finite", "eventually-periodic")
    assert out["digits"]
    result = runner.invoke(main, ["expand", cfg, "1/2"])
    assert result.exit_code == 2                       # not an integer vector
    cfg2 = _config(tmp_path, EXAMPLE_2D)
    result = runner.invoke(main, ["expand", cfg2, "1,2,3"])
    assert result.exit_code == 2                       # dimension mismatch


def test_tile_csv_contract(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["tile", cfg, "--k", "3"])
    assert result.exit_code == 0
    rows = list(csv.reader(io.StringIO(result.stdout)))
    assert rows[0] == ["re_1", "badic", "embed"]
    assert len(rows) == 1 + 27
    # deterministic export
    again = runner.invoke(main, ["tile", cfg, "--k", "3"])
    assert again.stdout == result.stdout


def test_tile_out_file_and_2d_quoting(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_2D)
    out_path = tmp_path / "cloud.csv"
    result = runner.invoke(main, ["tile", cfg, "--k", "2",
                                  "--out", str(out_path)])
    assert result.exit_code == 0
    text = out_path.read_text()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["re_1", "re_2", "badic", "embed"]
    assert len(rows) == 1 + 100
    # digit vectors contain commas; the csv module must keep them one field
    assert all(len(r) == 4 for r in rows[1:])


def test_tile_degenerate_exits_3(runner, tmp_path):
    cfg = _config(tmp_path, DEGENERATE)
    result = runner.invoke(main, ["tile", cfg, "--k", "2"])
    assert result.exit_code == 3


def test_tile_cap_exits_2(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_2D)
    result = runner.invoke(main, ["tile", cfg, "--k", "9", "--cap", "1000"])
    assert result.exit_code == 2


def test_tiling_report(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["tiling", cfg, "--k", "5",
                                  "--samples", "10", "--seed", "7"])
    assert result.exit_code == 0
    out = json.loads(result.stdout)
    assert out["k"] == 5 and out["samples"] == 10 and out["seed"] == 7
    assert out["modal_multiplicity"] >= 1
    assert 0 < out["fraction_at_mode"] <= 1
    assert isinstance(out["window_adequate"], bool)


def test_chars_worked_value(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["chars", cfg,
                                  "--s", "v=-1;d=1", "--y", "v=-1;d=1"])
    assert result.exit_code == 0
    assert "S = 9/4" in result.output
    assert "1/4 turns" in result.output


def test_chars_combined_angle(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["chars", cfg,
                                  "--s", "v=-1;d=1", "--y", "v=-1;d=1",
                                  "--r", "1/3", "--x", "1/2"])
    assert result.exit_code == 0
    assert "combined:" in result.output


def test_chars_plain_vector_point(runner, tmp_path):
    cfg = _config(tmp_path, EXAMPLE_1D)
    result = runner.invoke(main, ["chars", cfg, "--s", "v=0;d=1", "--y", "3"])
    assert result.exit_code == 0
    assert "0/1 turns" in result.output
