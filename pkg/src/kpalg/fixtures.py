"""Shipped example algebras.

Each fixture is a config file in ``kpalg/fixtures``.  The level-set
ellipsoids are also available through :func:`ellipsoid_text` so tests can
build other rational parameter choices.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from .config import AlgebraConfig, parse_config
from .errors import SemanticError

__all__ = ["ELLIPSOID_PARAMS", "ellipsoid_text", "ellipsoid_name", "fixture_names",
           "fixture_text", "load_fixture"]

ELLIPSOID_PARAMS = ((1, 1, 1), (1, 2, 3), (2, 1, 1), (1, 1, 5), (3, 2, 7))


def _q(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"


def ellipsoid_name(a, b, c) -> str:
    return "ellipsoid-" + "-".join(str(Fraction(v)).replace("/", "_") for v in (a, b, c))


def ellipsoid_text(a, b, c) -> str:
    """Level set ``C = (a x^2 + b y^2 + c z^2 - 1)/2`` with Euclidean metric."""
    a, b, c = (Fraction(v) for v in (a, b, c))
    if 0 in (a, b, c):
        raise SemanticError("ellipsoid parameters must be nonzero")
    tau = f"{_q(a * a)}*x^2 + {_q(b * b)}*y^2 + {_q(c * c)}*z^2"
    return "\n".join([
        f"# Ellipsoid a={a}, b={b}, c={c}; eta = 1/(a^2 x^2 + b^2 y^2 + c^2 z^2).",
        "generators: x, y, z",
        f"levelset C = 1/2*({_q(a)}*x^2 + {_q(b)}*y^2 + {_q(c)}*z^2 - 1)",
        f"denominator: {tau}",
        "metric: euclidean",
        f"eta: 1/({tau})",
        "",
    ])


def _dir():
    return resources.files("kpalg") / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-3] for p in _dir().iterdir() if p.name.endswith(".kp"))


def fixture_text(name: str) -> str:
    path = _dir() / f"{name}.kp"
    if not path.is_file():
        raise SemanticError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return path.read_text()


def load_fixture(name: str) -> AlgebraConfig:
    return parse_config(fixture_text(name), f"fixture:{name}")
