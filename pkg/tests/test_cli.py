import json
import subprocess
import sys

import pytest

from hsjet.cli import main
from hsjet.ratpoly import parse


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_jet_example(capsys):
    code, out, _ = run(capsys, "jet", "--ring", "s=2 n=1", "--f", "x1*x2", "--j", "1")
    assert code == 0
    assert out == "x1^(0)*x2^(1) + x1^(1)*x2^(0)\n"
    assert parse(out.strip()) == parse("x1^(0)*x2^(1) + x1^(1)*x2^(0)")


def test_jet_json(capsys):
    code, out, _ = run(capsys, "jet", "--ring", "s=1 n=2", "--f", "x1^2", "--j", "2", "--json")
    assert code == 0
    assert json.loads(out) == {"jet": "2*x1^(0)*x1^(2) + x1^(1)^2"}


def test_kernel_example(capsys):
    code, out, _ = run(capsys, "kernel", "--n", "2", "--deriv", "deriv m=2 / partial x2,x2 1/2")
    assert code == 0
    assert out == '{"member": true}\n'


def test_kernel_non_member_has_witness(capsys):
    code, out, _ = run(capsys, "kernel", "--n", "1", "--deriv", "deriv m=2 / partial x0,x1 1")
    assert code == 0
    payload = json.loads(out)
    assert payload["member"] is False
    assert payload["witness"]


def test_deriv_from_file(capsys, tmp_path):
    spec = tmp_path / "d.txt"
    spec.write_text("deriv m=2\npartial x1^(1),x1^(1) 1/2\n")
    code, out, _ = run(capsys, "apply", "--ring", "s=1 n=1", "--deriv", f"@{spec}", "--f", "x1^(1)^3")
    assert code == 0
    assert out == "3*x1^(1)\n"


def test_section_round_trip(capsys):
    text = "series m=2\ncomp 1 x1^(0) 1\ncomp 0 x1^(0)^2 3*x1^(0)"
    code, out, _ = run(capsys, "section", "--ring", "s=1 n=1", "--deriv", text, "--json")
    assert code == 0
    assert json.loads(out)["roundtrip"] is True


def test_commute(capsys):
    code, out, _ = run(capsys, "commute", "--ring", "s=1 n=2", "--alpha", "x1^(1)", "--l", "2", "--f", "x1^2")
    assert code == 0
    assert out.splitlines() == ["2*x1^(1)", "2*x1^(1)", "equal"]


def test_section3(capsys):
    code, out, _ = run(capsys, "section3")
    payload = json.loads(out)
    assert code == 0
    assert payload["certificate"] is True
    assert payload["nonmembership"] == "infeasible"
    assert payload["nonmembership_with_jet_ideal"] == "feasible"


def test_tower(capsys):
    code, out, _ = run(capsys, "tower", "--k", "3", "--json")
    payload = json.loads(out)
    assert code == 0
    assert payload["phi_zero"] and payload["member"] and payload["image_compatible"]
    assert payload["restriction_compatible"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["jet", "--ring", "s=2 n=1", "--f", "x1 +", "--j", "1"],
        ["jet", "--ring", "s=2 n=1", "--f", "x1"],
        ["jet", "--ring", "s=2", "--f", "x1", "--j", "1"],
        ["jet", "--ring", "s=1 n=1", "--f", "x1", "--j", "2"],
        ["kernel", "--n", "1", "--deriv", "m=2"],
        ["apply", "--ring", "s=1 n=1", "--deriv", "@/nonexistent/spec", "--f", "x1"],
        ["verify", "--suite", "nope"],
        ["tower", "--k", "-1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.startswith(f"hsjet {argv[0]}: ")


def test_verify_single_suite_is_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "--suite", "leibniz", "--seed", "7")
    code, b, _ = run(capsys, "verify", "--suite", "leibniz", "--seed", "7")
    assert code == 0
    assert a == b
    report = json.loads(a)
    assert report["ok"] and report["seed"] == 7
    assert report["suites"][0]["cases"] == report["suites"][0]["passed"] == 300


def test_verify_reports_tower_failure(capsys):
    code, out, err = run(capsys, "verify", "--suite", "tower")
    assert code == 1
    suite = json.loads(out)["suites"][0]
    assert suite["failed"] == 3
    assert suite["first_failure"]["inputs"]["k"] == 3
    assert "tower failed" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hsjet.cli", "jet", "--ring", "s=2 n=1", "--f", "x1*x2", "--j", "1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "x1^(0)*x2^(1) + x1^(1)*x2^(0)\n"
