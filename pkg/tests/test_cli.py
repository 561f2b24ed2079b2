import csv
import io
import json
import subprocess
import sys

import pytest

from mnvbench.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_all_json(capsys):
    code, out, _ = run(capsys, "verify", "--format", "json")
    assert code == 0
    reports = json.loads(out)
    assert isinstance(reports, list) and len(reports) == 7
    assert all(r["status"] == "pass" for r in reports)
    assert all(not isinstance(v, (dict, list)) for r in reports for v in r.values())
    assert [r["check"] for r in reports][:4] == ["dbar", "pde", "denominator", "realness"]


@pytest.mark.parametrize("check", ["pde", "dbar", "denominator", "realness", "singularity"])
def test_verify_single(capsys, check):
    code, out, _ = run(capsys, "verify", "--check", check, "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["check", "status", "degree", "terms", "millis"]
    assert rows[1][:2] == [check, "pass"]


def test_verify_text_summary(capsys):
    code, out, _ = run(capsys, "verify", "--check", "geometry")
    assert code == 0 and out.rstrip().endswith("2/2 certificates pass")


def test_no_timings(capsys):
    _, out, _ = run(capsys, "verify", "--check", "dbar", "--format", "json", "--no-timings")
    assert json.loads(out)[0]["millis"] is None


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--check", "bogus"],
        ["frobnicate"],
        ["integrate", "--s", "abc"],
        ["probe", "ray", "--s", "1"],
        ["probe", "ray", "--field", "V"],
        ["export", "--nx", "1"],
        ["export", "--range", "1,0,0,1"],
        ["export", "--field", "gamma"],
        ["eval", "--expr", "x+", "--x", "1", "--y", "0"],
        ["eval", "--x", "1", "--y", "0"],
        ["verify", "--workers", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_parse_error_message(capsys):
    _, _, err = run(capsys, "eval", "--expr", "x+", "--x", "1", "--y", "0")
    assert "ParseError" in err and "position 2" in err


def test_integrate(capsys):
    code, out, _ = run(capsys, "integrate", "--s", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "3pi" and d["deviation"] <= 1e-5
    code, out, _ = run(capsys, "integrate", "--s", "0", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "2pi"


def test_integrate_default_s_is_one(capsys):
    _, out, _ = run(capsys, "integrate", "--format", "json")
    assert json.loads(out)["s"] == 1.0


def test_integrate_unreachable_tolerance(capsys):
    code, out, err = run(capsys, "integrate", "--tol", "1e-12")
    assert code == 1 and "ToleranceNotMet" in err and out == ""


def test_probe_ray(capsys):
    code, out, _ = run(capsys, "probe", "ray", "--phi", "0", "--format", "json")
    d = json.loads(out)
    assert code == 0 and abs(d["extrapolated_limit"] + 1) <= 1e-6


def test_probe_decay_v(capsys):
    code, out, _ = run(capsys, "probe", "decay", "--field", "V", "--s", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["sup_stable"] is True and d["reference"] is None


def test_export(capsys):
    code, out, _ = run(capsys, "export", "--nx", "3", "--ny", "3", "--range=-1,1,-1,1", "--s", "0")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["x", "y", "re", "im"] and len(rows) == 10
    centre = rows[5]
    assert centre == ["0", "0", "", ""]
    assert rows[1][:2] == ["-1", "-1"] and rows[2][:2] == ["0", "-1"]


def test_export_to_file(tmp_path, capsys):
    path = tmp_path / "grid.csv"
    code, out, _ = run(capsys, "export", "--nx", "2", "--ny", "2", "--s", "1", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("x,y,re,im\n")


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--check", "dbar", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 1 and "cannot write" in err


def test_eval_exact(capsys):
    code, out, _ = run(capsys, "eval", "--expr", "i*(x^2-y^2)", "--x", "1", "--y", "1/2", "--exact", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == "3/4*i"


def test_eval_field(capsys):
    code, out, _ = run(capsys, "eval", "--field", "U", "--x", "1", "--y", "0", "--s", "1", "--exact")
    assert code == 0 and "value: 3/5" in out


def test_eval_singular(capsys):
    code, _, err = run(capsys, "eval", "--field", "U", "--x", "0", "--y", "0")
    assert code == 1 and "SingularPoint" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mnvbench", "eval", "--field", "U", "--x", "1", "--y", "0", "--exact"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and "value: -12/13" in proc.stdout


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.strip()
