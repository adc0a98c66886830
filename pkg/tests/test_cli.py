import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from kummer_gap import cli
from kummer_gap.errors import StepFailure
from kummer_gap.report import Report, fmt_float, matches_printed

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "schemas" / "report.schema.json").read_text())
WORKED_Y = "5.307955819492022"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zeros_golden_pass(capsys):
    code, out, _ = run(capsys, "zeros", "--b", "1.5", "--y", WORKED_Y, "--count", "11", "--golden", "table1")
    assert code == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11 and all(r["result"] == "PASS" for r in rows)


def test_zeros_golden_rounded_threshold_mismatch(capsys):
    # With z from the rounded y the seventh zero rounds to -9.034, not the printed -9.035.
    code, out, _ = run(capsys, "zeros", "--b", "1.5", "--z", "14.0873", "--count", "11", "--golden", "table1")
    assert code == cli.EXIT_MISMATCH
    failed = [r["index"] for r in csv.DictReader(io.StringIO(out)) if r["result"] == "FAIL"]
    assert failed == ["7"]


def test_zeros_plain(capsys):
    code, out, _ = run(capsys, "zeros", "--b", "5", "--z", "21", "--count", "5")
    assert code == 0
    assert len(list(csv.DictReader(io.StringIO(out)))) == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["zeros", "--b", "1.5", "--z", "1", "--count", "0"],
        ["interval", "--pfa", "0.6"],
        ["interval", "--n", "1"],
        ["monotonicity", "2", "1", "3"],
        ["mc", "--y", "5", "--dt", "0.05"],
        ["bogus"],
    ],
)
def test_usage_errors(capsys, argv):
    code = None
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_numerical_failure_exit(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise StepFailure("step size underflow")

    monkeypatch.setattr(cli, "find_zeros", boom)
    code, _, err = run(capsys, "zeros", "--b", "1.5", "--z", "5", "--count", "2")
    assert code == cli.EXIT_NUMERICAL and "StepFailure" in err


def test_interval_json_schema(capsys):
    code, out, _ = run(capsys, "interval", "--m", "3", "--n", "10", "--pfa", "1e-4", "--N", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    row = doc["rows"][0]
    assert row["upper"] == pytest.approx(9.99282e-5, abs=5e-10)
    assert row["lower"] == pytest.approx(9.99199e-5, abs=5e-10)


def test_interval_golden_table2(capsys):
    code, out, _ = run(capsys, "interval", "--golden", "table2")
    assert code == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16 and all(r["result"] == "PASS" for r in rows)


def test_monotonicity_series(capsys):
    code, out, _ = run(capsys, "monotonicity", "0.1", "0.31", "5")
    assert code == 0
    assert [r["a_bar_star"] for r in csv.DictReader(io.StringIO(out))] == ["none"] * 5
    code, out, _ = run(capsys, "monotonicity", "1.5", "1.5", "1")
    assert float(next(csv.DictReader(io.StringIO(out)))["a_bar_star"]) == pytest.approx(-2.153, abs=5e-4)
    code, out, _ = run(capsys, "monotonicity", "10", "10000", "7", "--log", "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    values = [r["a_bar_star"] for r in doc["rows"]]
    # the threshold deepens slowly: still modest at b = 10^4
    assert all(x > y for x, y in zip(values, values[1:]))
    assert -40 < values[-1] < values[0] < 0


def test_mc_zero_threshold(capsys):
    code, out, _ = run(capsys, "mc", "--y", "0", "--paths", "500")
    assert code == 0
    assert float(next(csv.DictReader(io.StringIO(out)))["p_hat"]) == 1.0


def test_mc_verify(capsys):
    code, out, _ = run(capsys, "mc", "--m", "3", "--n", "10", "--y", WORKED_Y, "--paths", "1000000", "--verify",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["rows"][0]["verdict"] == "CONTAINED"


def test_csv_and_json_carry_same_values(capsys, tmp_path):
    target = tmp_path / "r.json"
    run(capsys, "zeros", "--b", "0.5", "--z", "5", "--count", "3", "--format", "json", "--out", str(target))
    _, text, _ = run(capsys, "zeros", "--b", "0.5", "--z", "5", "--count", "3")
    doc = json.loads(target.read_text())
    for jrow, crow in zip(doc["rows"], csv.DictReader(io.StringIO(text))):
        for key, value in jrow.items():
            expected = fmt_float(value) if isinstance(value, float) else str(value)
            assert crow[key] == expected
            if isinstance(value, float):
                assert float(crow[key]) == value


def test_byte_identical_subprocess_runs(tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        subprocess.run(
            [sys.executable, "-m", "kummer_gap.cli", "interval", "--format", "json", "--out", str(path)],
            check=True,
        )
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_report_twelve_digits():
    r = Report("zeros", {})
    r.add(x=1 / 3, name="a", flag=True, missing=None)
    assert r.to_csv() == "x,name,flag,missing\n0.333333333333,a,true,\n"
    assert json.loads(r.to_json())["rows"][0]["x"] == 0.333333333333


def test_matches_printed():
    assert matches_printed(-4.01449e-5, "-4.014e-05")
    assert matches_printed(-9.0345212, "-9.035")
    assert not matches_printed(-9.0343994, "-9.035")
