import json

import numpy as np
import pytest

from fracmix import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mixed_eigenvalue_text(capsys):
    code, out, _ = run(capsys, "spectrum", "mixed", "--alpha", "1.5")
    assert code == 0
    assert out.strip() == "-0.697078"


def test_green_eval(capsys):
    code, out, _ = run(capsys, "green", "eval", "--alpha", "2", "--lambda", "0", "--t", "0.3", "--s", "0.8")
    assert code == 0
    assert float(out) == pytest.approx(0.3)


def test_reference_table(capsys):
    code, out, _ = run(capsys, "verify", "table1", "--tol", "1e-5")
    assert code == 0
    assert "10/10 checks passed" in out


def test_ml_json_and_csv(capsys):
    code, out, _ = run(capsys, "ml", "--alpha", "1", "--beta", "1", "--x", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(np.e)
    code, out, _ = run(capsys, "ml", "--alpha", "2", "--beta", "1", "--x", "0", "-1", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "# x,value"
    assert len(lines) == 3
    assert float(lines[2].split(",")[1]) == pytest.approx(np.cos(1.0), abs=1e-11)


def test_csv_has_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "spectrum", "scan", "--alpha", "2", "--t0", "0.5", "--format", "csv")
    header, row = out.splitlines()
    assert header == "# alpha,t0,lambda_sub,lambda_mixed,lambda_dirichlet"
    cells = row.split(",")
    assert cells[2] == f"{-np.pi**2:.11e}"


def test_scan_range(capsys):
    code, out, _ = run(capsys, "spectrum", "mixed", "--alpha-range", "1.1:1.3:0.1")
    assert code == 0
    assert len(out.splitlines()) == 3


def test_output_file(tmp_path, capsys):
    path = tmp_path / "m.csv"
    code, out, _ = run(capsys, "green", "bounds", "--alpha", "2", "--lambda", "0", "--grid", "65", "--out", str(path))
    assert code == 0 and out == ""
    data = np.loadtxt(path, delimiter=",", comments="#")
    np.testing.assert_allclose(data[:, 1], data[:, 0], atol=1e-10)


def test_positivity_report(capsys):
    code, out, _ = run(capsys, "green", "positivity", "--alpha", "1.7", "--lambda", "-1.7", "--grid", "65",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["all_positive"] is False
    assert any(t < s for t, s in rep["witnesses"])


def test_solve_linear(capsys):
    code, out, _ = run(capsys, "solve", "linear", "--alpha", "2", "--lambda", "0", "--rhs-expr", "1",
                       "--grid", "65", "--format", "csv")
    assert code == 0
    data = np.loadtxt(out.splitlines(), delimiter=",", comments="#")
    t, w = data[:, 0], data[:, 1]
    np.testing.assert_allclose(w, t - t**2 / 2, atol=1e-12)


def test_solve_picard_json(capsys):
    code, out, err = run(capsys, "solve", "picard", "--alpha", "1.6667", "--lambda", "0", "--builtin", "example2",
                         "--K", "0.25", "--grid", "129", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["converged"] is True
    assert rep["certificate_q"] < 1
    assert len(rep["solution"]["t"]) == 129


def test_solve_monotone_bracket_files(tmp_path, capsys):
    t = np.linspace(0, 1, 101)
    lo, hi = tmp_path / "lo.csv", tmp_path / "hi.csv"
    np.savetxt(lo, np.column_stack([t, 0 * t]), delimiter=",", header="t,w")
    np.savetxt(hi, np.column_stack([t, t]), delimiter=",", header="t,w")
    code, out, err = run(capsys, "solve", "monotone", "--alpha", "2", "--lambda", "0", "--f-expr", "1",
                         "--lower-file", str(lo), "--upper-file", str(hi), "--grid", "65")
    assert code == 0
    assert "monotone" in err


def test_monotone_order_violation_is_usage_error(tmp_path, capsys):
    t = np.linspace(0, 1, 11)
    lo, hi = tmp_path / "lo.csv", tmp_path / "hi.csv"
    np.savetxt(lo, np.column_stack([t, t]), delimiter=",")
    np.savetxt(hi, np.column_stack([t, 0 * t]), delimiter=",")
    code, _, err = run(capsys, "solve", "monotone", "--alpha", "2", "--lambda", "0", "--f-expr", "1",
                       "--lower-file", str(lo), "--upper-file", str(hi))
    assert code == 2
    assert "exceeds" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "mixed"],
        ["spectrum", "mixed", "--alpha", "2.5"],
        ["green", "eval", "--alpha", "1.5", "--lambda", "0", "--t", "0.5"],
        ["green", "eval", "--alpha", "1.5", "--lambda", "0", "--t", "1.5", "--s", "0.2"],
        ["solve", "picard", "--alpha", "1.5", "--lambda", "0", "--f-expr", "u+"],
        ["solve", "picard", "--alpha", "1.5", "--lambda", "0", "--builtin", "nope"],
        ["solve", "picard", "--alpha", "1.5", "--lambda", "-3", "--f-expr", "1"],
        ["solve", "linear", "--alpha", "1.5", "--lambda", "0"],
        ["spectrum", "mixed", "--alpha-range", "1:2"],
        ["nonsense"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_numeric_failure_exit_code(capsys):
    code, _, err = run(capsys, "solve", "picard", "--alpha", "1.5", "--lambda", "0", "--f-expr", "2*u+1",
                       "--max-iter", "3", "--grid", "33")
    assert code == 3
    assert "MaxIterExceeded" in err


def test_determinism(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert cli.main(["spectrum", "scan", "--alpha-range", "1.5:1.7:0.1", "--t0", "0.4", "--format", "csv",
                         "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
