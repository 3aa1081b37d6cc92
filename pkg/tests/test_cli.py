import csv
import json
import subprocess
import sys

import pytest

from corrkit.cli import main


def run_cli(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, str(out)])
    return code, json.loads(out.read_text())


def test_check_usc_ex1(tmp_path):
    code, rep = run_cli(tmp_path, "check-usc", "ex1.json")
    assert code == 1 and rep["verdict"] == "counterexample"
    assert rep["result"]["counterexample"]["location"] == [2.0]


def test_check_usc_constant(tmp_path):
    code, rep = run_cli(tmp_path, "check-usc", "constant.json")
    assert code == 0 and rep["verdict"] == "pass"


def test_demo(tmp_path):
    code, rep = run_cli(tmp_path, "demo-ex1")
    assert code == 0
    assert len(rep["result"]["stages"]) == 5
    assert 2.0 <= rep["result"]["fixed_point"] <= 4.0


@pytest.mark.parametrize(
    "args,code",
    [
        (("check-wcg", "ex1_wcg.json"), 1),
        (("check-wnq", "ex1_wnq.json"), 0),
        (("search-wnq", "ex1.json", "--points", "1,3"), 0),
        (("search-wnq", "separated.json", "--points", "0,1"), 1),
        (("check-star", "constant_star.json"), 0),
        (("check-wnqs", "econ1_wnqs.json"), 0),
        (("check-nqc", "step.json"), 0),
        (("check-ols", "ex1.json"), 1),
        (("select", "ex1_select.json"), 0),
        (("select-star", "constant_star.json"), 0),
        (("validate-selection", "ex1_select.json"), 0),
        (("brouwer", "brouwer_swap.json"), 0),
        (("compose-fix", "ex1_compose.json"), 0),
        (("setval-fix", "constant.json"), 0),
        (("compute-w", "econ1.json"), 0),
        (("equilibrium-selection", "econ1.json"), 0),
        (("equilibrium-selection", "econ1_full_w.json"), 1),
        (("equilibrium-approx", "econ1_approx.json"), 0),
        (("verify-equilibrium", "econ1_verify.json"), 0),
        (("verify-equilibrium", "econ1.json", "--point", "0.2"), 1),
    ],
)
def test_exit_codes(tmp_path, args, code):
    got, rep = run_cli(tmp_path, *args)
    assert got == code, rep["result"]
    assert rep["exit_code"] == code


def test_input_errors_exit_2(tmp_path):
    (tmp_path / "empty.json").write_text("")
    (tmp_path / "nob.json").write_text(json.dumps({"kind": "economy", "version": "1.0", "agents": [{"X": [0, 1]}]}))
    for args in (
        ("check-usc", str(tmp_path / "missing.json")),
        ("check-usc", str(tmp_path / "empty.json")),
        ("compute-w", str(tmp_path / "nob.json")),
        ("check-wcg", "ex1.json"),  # no points
    ):
        code, rep = run_cli(tmp_path, *args)
        assert code == 2 and rep["verdict"] == "input-error"
        assert rep["result"]["error"]["type"]


def test_missing_input_exit_2(capsys):
    assert main(["check-usc"]) == 2
    assert json.loads(capsys.readouterr().out)["verdict"] == "input-error"


def test_schema_error_names_field(tmp_path):
    code, rep = run_cli(tmp_path, "compute-w", "econ1.json")
    assert code == 0
    data = rep["inputs"]["economy"]
    del data["agents"][0]["B"]
    p = tmp_path / "nob.json"
    p.write_text(json.dumps({"kind": "economy", "version": "1.0", "agents": data["agents"]}))
    code, rep = run_cli(tmp_path, "compute-w", str(p))
    assert code == 2 and rep["result"]["error"]["field"] == "B"


def test_report_replay(tmp_path):
    first = tmp_path / "first.json"
    assert main(["check-lsc", "ex1.json", str(first)]) == 1
    second = tmp_path / "second.json"
    assert main(["check-lsc", str(first), str(second)]) == 1
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    a.pop("metadata"), b.pop("metadata")
    assert a == b


def test_flags_recorded(tmp_path):
    code, rep = run_cli(tmp_path, "check-usc", "ex1.json", "--grid", "101", "--tol", "1e-7")
    assert rep["options"]["grid"] == 101 and rep["options"]["tol"] == 1e-7
    assert rep["result"]["counterexample"]["location"] == [2.0]


def test_csv_tables(tmp_path):
    path = tmp_path / "f.csv"
    assert main(["select", "ex1_select.json", str(tmp_path / "r.json"), "--csv", str(path), "--grid", "11"]) == 0
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["x", "f"] and len(rows) == 12
    path = tmp_path / "t.csv"
    assert main(["brouwer", "brouwer_swap.json", str(tmp_path / "r.json"), "--csv", str(path)]) == 0
    assert next(csv.reader(open(path))) == ["iteration", "residual"]


def test_metadata_is_only_difference(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["check-wcg", "ex1_wcg.json", str(a)])
    main(["check-wcg", "ex1_wcg.json", str(b)])
    strip = lambda p: {k: v for k, v in json.loads(p.read_text()).items() if k != "metadata"}  # noqa: E731
    assert json.dumps(strip(a), sort_keys=True) == json.dumps(strip(b), sort_keys=True)
    assert set(json.loads(a.read_text())["metadata"]) == {"timestamp", "tool", "tool_version"}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "corrkit", "check-usc", "constant.json"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "pass"
