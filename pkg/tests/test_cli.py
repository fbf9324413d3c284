import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qwsearch import cli
from qwsearch.exceptions import ConfigError, InsufficientData


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_marked():
    assert cli.parse_marked("random:3,9:7", "hypercube") == cli.MarkedSpec(counts=(3, 9), seed=7)
    assert cli.parse_marked("0:0,1:0", "lattice").explicit == ((0, 0), (1, 0))
    assert cli.parse_marked("0,7", "hypercube").explicit == (0, 7)
    for bad in ("", ",", "random:0:1", "random:3", "0,0", "1:2:3"):
        with pytest.raises(ConfigError):
            cli.parse_marked(bad, "lattice" if ":" in bad and "random" not in bad else "hypercube")


def test_parse_sizes():
    assert cli.parse_sizes("30..32,40") == [30, 31, 32, 40]
    with pytest.raises(ConfigError):
        cli.parse_sizes(",")


def test_scaling_columns_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["scaling", "--sizes", "10,12", "--marked", "random:1,2:3"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0].split(",")
    assert header[:8] == ["n", "N", "m_count", "lambda", "t_opt", "p_succ", "t_run", "rescaled_t"]
    rows = _rows(a)
    assert [(r["m_count"], r["n"]) for r in rows] == [("1", "10"), ("1", "12"), ("2", "10"), ("2", "12")]
    r = rows[-1]
    assert math.isclose(float(r["rescaled_t"]), float(r["t_opt"]) * math.sqrt(2) / 64)


def test_scaling_m2_n20_row(tmp_path):
    out = tmp_path / "s.csv"
    cli.main(["scaling", "--sizes", "20,30", "--marked", "random:2:0", "--out", str(out)])
    rows = _rows(out)
    target = lambda n: math.pi * math.sqrt(2.0 ** n) / 4
    # finite-n correction ~0.6/n: 3% at n = 20, inside 2% from n = 28 on
    assert abs(float(rows[0]["t_opt"]) / target(20) - 1) < 0.035
    assert abs(float(rows[1]["t_opt"]) / target(30) - 1) < 0.02


def test_scaling_row_error_tag(tmp_path, monkeypatch):
    from qwsearch.exceptions import NoRootInInterval

    def boom(model, **kw):
        raise NoRootInInterval("exceptional")
    monkeypatch.setattr(cli, "solve", boom)
    out = tmp_path / "s.csv"
    assert cli.main(["scaling", "--sizes", "8", "--marked", "0,1", "--out", str(out)]) == 0
    row = _rows(out)[0]
    assert row["error"].startswith("NoRootInInterval") and row["lambda"] == "nan"


def test_fit_synthetic(tmp_path):
    path = tmp_path / "in.csv"
    ns = np.arange(20, 61)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "p_succ"])
        for n in ns:
            w.writerow([int(n), repr(float(0.5 - 0.65 / n ** 1.056))])
        w.writerow([70, 0.6])
    with pytest.warns(UserWarning):
        res = cli.run_fit(str(path))
    assert abs(res["coefficient"] - 0.65) < 1e-6 and abs(res["exponent"] - 1.056) < 1e-6
    assert res["rows_used"] == 31 and res["rows_dropped"] == 1
    assert abs(res["r_squared"] - 1) < 1e-12


def test_fit_insufficient(tmp_path):
    path = tmp_path / "in.csv"
    path.write_text("n,p_succ\n30,0.4\n31,0.41\n10,0.3\n")
    with pytest.raises(InsufficientData):
        cli.run_fit(str(path))
    assert cli.main(["fit", "--input", str(path)]) == 2


def test_validate_modes(tmp_path):
    out = tmp_path / "v.csv"
    assert cli.main(["validate", "--sizes", "6", "--marked", "random:2:0", "--repeats", "20", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 20 and all(r["passed"] == "true" for r in rows)
    assert all(float(r["abs_dlambda"]) <= 1e-8 for r in rows)
    assert cli.main(["validate", "--graph", "lattice", "--sizes", "8", "--marked", "0:0,1:0", "--out", str(out)]) == 0


def test_validate_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "smallest_nonzero_eigenphase", lambda g, m: (1.0, 0.1))
    assert cli.main(["validate", "--sizes", "4", "--marked", "0,3", "--out", str(tmp_path / "v.csv")]) == 2


def test_validate_dense_cap(tmp_path):
    assert cli.main(["validate", "--sizes", "12", "--marked", "0,3"]) == 3


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["scaling", "--sizes", "8"],
    ["scaling", "--marked", "0,1"],
    ["validate", "--sizes", "6", "--marked", ","],
    ["scaling", "--sizes", "1", "--marked", "0"],
    ["scaling", "--sizes", "4", "--marked", "99"],
    ["fit"],
    ["simulate", "--sizes", "4", "--marked", "0", "--tmax", "0"],
])
def test_config_errors_exit_3(argv):
    assert cli.main(argv) == 3


def test_lemmas_and_constants(tmp_path):
    out = tmp_path / "l.csv"
    assert cli.main(["lemmas", "--out", str(out)]) == 0
    rows = _rows(out)
    assert list(rows[0]) == ["lemma", "n", "v", "lhs", "rhs", "abs_err", "passed"]
    assert {r["lemma"] for r in rows} == {"B1", "B2", "S2", "S_odd", "S_even"}
    out = tmp_path / "c.csv"
    assert cli.main(["constants", "--sizes", "2,64", "--out", str(out)]) == 0
    rows = _rows(out)
    assert math.isclose(float(rows[0]["c_estimate"]), 2.5 / (4 * math.log(4)))


def test_analyze_and_simulate(tmp_path, capsys):
    out = tmp_path / "a.json"
    assert cli.main(["analyze", "--graph", "lattice", "--sizes", "8", "--marked", "0:0,4:4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc[0]["marked"] == "0:0 4:4" and abs(doc[0]["lambda"] - 0.21572980107667103) < 1e-10
    assert cli.main(["simulate", "--sizes", "6", "--marked", "0,7", "--tmax", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,m_count,marked,t,p_sim,p_model" and len(lines) == 7


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "qwsearch.cli", "constants", "--sizes", "4"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("sqrt_n,")
