import io
import json
import subprocess
import sys

import pytest

from multiboson.cli import VerificationReport, apply_golden, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.mark.parametrize("system, lhs, rhs, want", [
    ("chi", "chi(z)", "chi(z)", "1/(z+w) * Id"),
    ("chi2", "<beta_chi>", "<gamma_chi>", "1/(z^2-w^2) * Id"),
    ("chi", "<h_chi_tw>", "<h_chi_tw>", "-(z^2+w^2)/(2*(z^2-w^2)^2) * Id"),
])
def test_ope_command(system, lhs, rhs, want):
    code, text = run("ope", system, lhs, rhs)
    assert code == 0
    assert text.splitlines()[0] == want
    assert text.splitlines()[-1].startswith("locality")


def test_ope_parse_error(capsys):
    code, _ = run("ope", "chi", "chi(z", "chi(z)")
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_unknown_suite(capsys):
    code, _ = run("verify", "nonsense")
    assert code == 2


def test_bad_scalar_flag():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "virasoro", "--a", "x/y"], io.StringIO())
    assert exc.value.code == 2


def test_fields_listing():
    code, text = run("fields")
    assert code == 0
    assert {"L1", "solitary", "h_chi_tw"} <= set(text.split())


def test_virasoro_single_family(tmp_path):
    report = tmp_path / "r" / "rep.json"
    code, text = run("verify", "virasoro", "--family", "L1", "--a", "1/2", "--b", "1/3", "--report", str(report))
    assert code == 0
    assert text.splitlines()[0] == "PASS  virasoro.L1[a=1/2,b=1/3]: c = 4; shape ok"
    data = json.loads(report.read_text())
    assert data and all(r["status"] == "pass" and r["schema_version"] == 1 for r in data)
    assert set(data[0]) == {"check_id", "system", "parameters", "status", "expected", "computed", "wall_time",
                            "schema_version"}


def test_appendix_suite_passes():
    code, text = run("verify", "--suite", "appendix", "--n", "3")
    assert code == 0
    assert text.splitlines()[-1].endswith("checks passed")


def test_iso_suite_reports_the_solitary_sign(tmp_path):
    report = tmp_path / "iso.json"
    code, _ = run("verify", "iso", "--report", str(report))
    data = {r["check_id"]: r for r in json.loads(report.read_text())}
    failing = [k for k, r in data.items() if r["status"] != "pass"]
    assert code == 1
    assert len(failing) == 1 and "solitary" in failing[0]


def _rep(computed, status="pass"):
    return VerificationReport("x.y", "chi", {}, status, "", computed)


def test_golden_files(tmp_path):
    apply_golden([_rep("1/(z+w)")], tmp_path)
    assert (tmp_path / "x.y.txt").read_text() == "1/(z+w)\n"
    same = _rep("1/(z+w)")
    apply_golden([same], tmp_path)
    assert same.status == "pass"
    changed = _rep("1/(z-w)")
    apply_golden([changed], tmp_path)
    assert changed.status == "fail" and "1/(z+w)" in changed.expected


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multiboson.cli", "ope", "chi", "chi(z)", "chi(z)"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("1/(z+w) * Id")
