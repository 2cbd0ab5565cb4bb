import csv
import io
import subprocess
import sys

import pytest

from subrisk.cli import EXIT_OK, EXIT_PARSE, EXIT_SIMULATION, EXIT_VALIDATION, main
from subrisk.datasets import uniform_table
from subrisk.tablefile import write_table

from expected_tables import BREAST_CANCER_APPROX, HOUSEHOLD_APPROX


@pytest.fixture
def uniform_file(tmp_path):
    path = tmp_path / "uniform.csv"
    write_table(uniform_table(), path)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_expand_uniform(capsys, uniform_file):
    code, out, err = run(capsys, "expand", "--table", uniform_file, "--n", "100,2000", "--csv")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert (rows[0]["f.risk.app"], rows[0]["s.risk.app"], rows[0]["ratio.app"]) == ("1.3283", "1.3332", "1.0037")
    assert rows[1]["r.s.s.app"] == "1991"
    assert "negativity threshold: 197" in err
    assert "warning" in err


def test_expand_breast_cancer_ratio(capsys, tmp_path):
    from subrisk.datasets import breast_cancer

    path = tmp_path / "bc.csv"
    write_table(breast_cancer(), path)
    code, out, _ = run(capsys, "expand", "--table", str(path), "--n", "1000", "--ratio-digits", "3", "--csv")
    assert code == EXIT_OK
    assert csv_rows(out)[0]["ratio.app"] == "0.725"


def test_expand_two_cells(capsys, tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("0.5,0.5\n")
    code, out, _ = run(capsys, "expand", "--table", str(path), "--groups", "0;1", "--n", "10", "--csv")
    assert code == EXIT_OK
    row = csv_rows(out)[0]
    assert row["f.risk.app"] == "0.0525"
    assert row["r.s.s.app"] == "NA"


def test_simulate_singletons_is_zero(capsys, tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("@groups 0;1;2\n0.2,0.3,0.5\n")
    code, out, _ = run(capsys, "simulate", "--table", str(path), "--n", "5", "--reps", "500", "--csv")
    assert code == EXIT_OK
    assert float(csv_rows(out)[0]["s.risk.sim"]) == 0.0


def test_simulate_reports_discard_failure(capsys, tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("@groups 0;1\n0.999999,0.000001\n")
    code, out, err = run(capsys, "simulate", "--table", str(path), "--n", "1", "--reps", "10")
    assert code == EXIT_SIMULATION
    assert "discard probability bound" in err


def test_sums_mismatch_warns(capsys, tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("@groups cols\n@sums 0.3,0.7\n0.25,0.25\n0.25,0.25\n")
    code, _, err = run(capsys, "simulate", "--table", str(path), "--n", "20", "--reps", "200")
    assert code == EXIT_OK
    assert "@sums differs" in err


@pytest.mark.parametrize(
    "content,expected",
    [
        ("0.5,0.5\n0.5,x\n", EXIT_PARSE),
        ("0.5,0.6\n0.1,0.1\n", EXIT_VALIDATION),
        ("0.5,0.5\n0.0,0.0\n", EXIT_VALIDATION),
    ],
)
def test_exit_codes(capsys, tmp_path, content, expected):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    code, _, err = run(capsys, "expand", "--table", str(path), "--n", "10")
    assert code == expected
    assert err


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--n", "10"])
    assert exc.value.code == 2


def test_console_script_entry_point(uniform_file):
    proc = subprocess.run(
        [sys.executable, "-m", "subrisk.cli", "expand", "--table", uniform_file, "--n", "100"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "1.3283" in proc.stdout


def test_report_uniform_csv(capsys):
    code, out, _ = run(capsys, "report", "--example", "1", "--csv")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert list(rows[0]) == [
        "n", "f.risk.app", "s.risk.app", "ratio.app", "r.s.s.app",
        "f.risk.sim", "s.risk.sim", "ratio.sim", "r.s.s.sim",
    ]
    assert [r["r.s.s.app"] for r in rows] == ["100", "200", "300", "399", "499", "996", "1991"]
    assert rows[3]["s.risk.app"] == "0.2690"


def test_report_breast_cancer_rss_row(capsys):
    code, out, _ = run(capsys, "report", "--example", "2")
    assert code == EXIT_OK
    line = next(l for l in out.splitlines() if l.strip().startswith("R.S.S. "))
    assert line.split()[1:] == [str(v[3]) for v in BREAST_CANCER_APPROX.values()]


def test_report_household_ratio_row(capsys):
    code, out, _ = run(capsys, "report", "--example", "3", "--csv")
    assert code == EXIT_OK
    got = [float(r["ratio.app"]) for r in csv_rows(out)]
    want = [v[2] for v in HOUSEHOLD_APPROX.values()]
    assert got == pytest.approx(want, abs=1e-3)


def test_report_sim_mode_csv(capsys):
    code, out, _ = run(capsys, "report", "--example", "2", "--mode", "both", "--reps", "2000", "--csv")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert len(rows) == 5
    assert all(r["r.s.s.sim"] for r in rows)
    assert all(0.5 < float(r["ratio.sim"]) < 1.0 for r in rows)
