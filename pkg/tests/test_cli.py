import json
import subprocess
import sys

import pytest

from kpalg import cli
from kpalg.fixtures import fixture_names


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fixtures_command(capsys):
    code, out, _ = run(capsys, "fixtures")
    assert code == cli.EXIT_OK
    assert out.split() == fixture_names()


def test_scalar_on_ellipsoid(capsys):
    code, out, _ = run(capsys, "scalar", "--fixture", "ellipsoid-1-2-3", "--no-header")
    assert code == 0
    assert "S / eta^2 = 12" in out.splitlines()


def test_verify_all_sphere(capsys):
    code, out, _ = run(capsys, "verify-all", "--fixture", "sphere", "--no-header")
    assert code == 0
    lines = out.splitlines()
    assert all(line.startswith("PASS") for line in lines if line[:4] in ("PASS", "FAIL"))
    assert sum(line.startswith("PASS") for line in lines) == 11
    assert "S = 2" in lines


def test_jacobi_on_sabotaged_table(capsys):
    code, out, _ = run(capsys, "jacobi", "--fixture", "su2-sabotaged", "--no-header")
    assert code == cli.EXIT_FAIL
    assert "FAIL  jacobi: Jacobiator on (x, y, z) = z" in out


def test_geometry_commands_refuse_non_poisson(capsys):
    code, _, err = run(capsys, "scalar", "--fixture", "su2-sabotaged")
    assert code == cli.EXIT_FAIL
    assert "Jacobi" in err


@pytest.mark.parametrize("command", ["jacobi", "kp-check", "blockdiag", "construct",
                                     "christoffel", "curvature", "ricci", "scalar",
                                     "verify-all"])
def test_every_command_json_and_text(capsys, command):
    fixture = "su2" if command in ("blockdiag", "construct") else "plane-lambda-x"
    code, text, _ = run(capsys, command, "--fixture", fixture, "--no-header")
    assert code == 0
    code2, raw, _ = run(capsys, command, "--fixture", fixture, "--no-header", "--json")
    assert code2 == 0
    doc = json.loads(raw)
    assert doc["command"] == command and doc["ok"] is True
    assert "header" not in doc
    # every reported check and scalar value appears in the text form too
    for c in doc["checks"]:
        assert f"{c['status']}  {c['name']}" in text
    for key, val in doc["values"].items():
        if isinstance(val, str):
            assert f"{key} = {val}" in text


def test_laplacian_command(capsys):
    code, out, _ = run(capsys, "laplacian", "--fixture", "sphere", "--no-header", "z")
    assert code == 0
    assert "Delta(f) = -2*z" in out.splitlines()


def test_no_header_is_deterministic(capsys):
    args = ("curvature", "--fixture", "ellipsoid-1-2-3", "--no-header")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]
    assert not first.startswith("#")
    with_header = run(capsys, "curvature", "--fixture", "ellipsoid-1-2-3")[1]
    assert with_header.startswith("# program=kpalg")
    assert with_header.split("\n", 1)[1] == first


def test_kp_check_wrong_eta(tmp_path, capsys):
    path = tmp_path / "bad.kp"
    path.write_text("generators: x, y\nbracket: x y : 1\neta: 2\n")
    code, out, _ = run(capsys, "kp-check", "--config", str(path), "--no-header")
    assert code == cli.EXIT_FAIL
    assert "FAIL  kp-relation" in out


@pytest.mark.parametrize("body, expected", [
    ("generators: x, y\nbracket: x y : 1 +\neta: 1\n", cli.EXIT_PARSE),
    ("generators: x, y\ncolour: red\n", cli.EXIT_PARSE),
    ("generators: x, y\nbracket: x y : w\neta: 1\n", cli.EXIT_SEMANTIC),
    ("generators: x, y\nbracket: x y : 1\n", cli.EXIT_SEMANTIC),
])
def test_error_exit_codes(tmp_path, capsys, body, expected):
    path = tmp_path / "c.kp"
    path.write_text(body)
    code, out, err = run(capsys, "scalar", "--config", str(path))
    assert code == expected
    assert out == ""
    assert err.strip()


def test_resource_limit(tmp_path, capsys):
    path = tmp_path / "big.kp"
    path.write_text("generators: x, y, z\n"
                    "relations: x^3 - y*z; y^3 - x*z; z^3 - x*y; x*y*z - 1\n"
                    "bracket: x y : 1\nflags: skip-jacobi\n")
    code, _, err = run(capsys, "jacobi", "--config", str(path), "--budget", "2")
    assert code == cli.EXIT_RESOURCE
    assert "resource limit" in err


@pytest.mark.parametrize("argv", [[], ["scalar"], ["scalar", "--fixture", "a", "--config", "b"],
                                  ["nope"], ["scalar", "--fixture", "sphere", "--budget", "0"],
                                  ["scalar", "--fixture", "sphere", "--max-terms", "0"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == cli.EXIT_USAGE


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "kpalg.cli", "scalar", "--fixture", "sphere",
                           "--no-header"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("S = 2")


def test_term_budget_exit_code(capsys):
    code, _, err = run(capsys, "scalar", "--fixture", "ellipsoid-1-2-3", "--max-terms", "3")
    assert code == cli.EXIT_RESOURCE
    assert "exceeds the budget of 3" in err
