import json

import pytest

from kpalg.config import build_algebra, load_config, parse_config, parse_config_json
from kpalg.errors import ParseError, SemanticError, VerificationError
from kpalg.fixtures import (ELLIPSOID_PARAMS, ellipsoid_name, ellipsoid_text, fixture_names,
                            fixture_text, load_fixture)
from kpalg.geometry import scalar

SU2 = """\
generators: x, y, z
bracket: x y : z
bracket: y z : x
bracket: z x : y
metric: construct
"""


def test_sphere_fixture_shape():
    cfg = load_fixture("sphere")
    alg = build_algebra(cfg)
    assert len(cfg.generators) == 3
    assert len(alg.ring.relations) == 1
    assert len(alg.ring.denoms) == 1


def test_fixture_list():
    names = fixture_names()
    for a, b, c in ELLIPSOID_PARAMS:
        assert ellipsoid_name(a, b, c) in names
    assert {"sphere", "plane-flat", "plane-lambda-x", "su2", "su2-sabotaged"} <= set(names)
    with pytest.raises(SemanticError):
        fixture_text("no-such-fixture")


@pytest.mark.parametrize("params", ELLIPSOID_PARAMS)
def test_ellipsoid_fixture_files_match_generator(params):
    assert fixture_text(ellipsoid_name(*params)) == ellipsoid_text(*params)


def test_all_fixtures_parse():
    for name in fixture_names():
        load_fixture(name)


def test_construct_flag():
    cfg = parse_config(SU2)
    assert cfg.constructs_metric
    alg = build_algebra(cfg)
    assert alg.construction is not None
    assert alg.kp is not None


def test_unknown_generator_in_bracket():
    with pytest.raises(SemanticError) as info:
        parse_config("generators: x, y, z\nbracket: x w : z\nmetric: euclidean\neta: 1\n")
    assert "line 2" in str(info.value)
    with pytest.raises(SemanticError) as info:
        parse_config("generators: x, y\nbracket: x y : w + 1\neta: 1\n")
    assert "unknown generator 'w'" in str(info.value)
    assert "line 2" in str(info.value)


@pytest.mark.parametrize("text, line", [
    ("generators: x, y\ncolour: red\n", 2),
    ("generators: x, y\nbracket: x y : 2x\neta: 1\n", 2),
    ("generators: x, y\ngenerators: x, y\n", 2),
    ("generators: x, y\nbracket x y 1\n", 2),
    ("generators: x, y\nmetric: euclidean\nmetric: x x : 1\n", 3),
    ("generators: x, y\n\nbracket: x y :\n", 3),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_expression_error_column():
    with pytest.raises(ParseError) as info:
        parse_config("generators: x, y\nbracket: x y : x*y +* 1\neta: 1\n")
    assert str(info.value).startswith("line 2, column 21")


@pytest.mark.parametrize("text", [
    "bracket: x y : 1\n",
    "generators: x, x\n",
    "generators: x, y\nflags: turbo\n",
    "generators: x, y\nlevelset C = x\n",
    "generators: x, y\nbracket: x x : 1\n",
    "generators: x, y\nbracket: x y : 1\nbracket: y x : 2\n",
    "generators: x, y\nmetric: construct\neta: 1\n",
    "generators: x, y\neta: construct\n",
])
def test_semantic_errors(text):
    with pytest.raises(SemanticError):
        parse_config(text)


def test_missing_eta():
    with pytest.raises(SemanticError):
        build_algebra(parse_config("generators: x, y\nbracket: x y : 1\n"))


def test_asymmetric_metric_rejected():
    text = "generators: x, y\nbracket: x y : 1\nmetric: x y : 1\nmetric: y x : 2\neta: 1\n"
    with pytest.raises(SemanticError):
        build_algebra(parse_config(text))


def test_jacobi_gate():
    with pytest.raises(VerificationError) as info:
        build_algebra(load_fixture("su2-sabotaged"))
    assert "Jacobi" in str(info.value)
    flagged = fixture_text("su2-sabotaged") + "flags: skip-jacobi\n"
    assert build_algebra(parse_config(flagged), kp=False).table is not None


def test_numeric_indices_and_lists():
    text = ("generators: x, y, z\nrelations: x^2 + y^2 + z^2 - 1\n"
            "denominators: x^2 + y^2 + z^2; x\n"
            "brackets: 1 2 : z; 2 3 : x; 3 1 : y\nmetric: euclidean\n"
            "eta: 1/(x^2 + y^2 + z^2)\n")
    alg = build_algebra(parse_config(text))
    sphere = build_algebra(load_fixture("sphere"))
    for i in range(3):
        for j in range(3):
            assert alg.table.P[i][j].to_text() == sphere.table.P[i][j].to_text()
    assert scalar(alg.kp).to_text() == "2"


def test_json_config_matches_text(tmp_path):
    doc = {"generators": ["x", "y"], "denominators": ["x"],
           "brackets": {"x y": "1"}, "metric": [["x", "x", "1/x"], ["y", "y", "1/x"]],
           "eta": "x^2"}
    path = tmp_path / "plane.json"
    path.write_text(json.dumps(doc))
    a = build_algebra(load_config(path))
    b = build_algebra(load_fixture("plane-lambda-x"))
    assert scalar(a.kp).to_text() == scalar(b.kp).to_text() == "-1 / x"
    with pytest.raises(ParseError):
        parse_config_json('{"generators": ["x"], "colour": 1}')
    with pytest.raises(ParseError):
        parse_config_json("[1, 2]")
    with pytest.raises(ParseError):
        parse_config_json('{"generators": ')


def test_load_config_missing_file(tmp_path):
    with pytest.raises(SemanticError):
        load_config(tmp_path / "absent.kp")
