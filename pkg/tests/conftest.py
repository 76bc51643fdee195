import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kpalg.config import build_algebra  # noqa: E402
from kpalg.fixtures import load_fixture  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def algebra(name: str):
    """Built (and verified) algebra for a shipped fixture, shared across tests."""
    return build_algebra(load_fixture(name))


@pytest.fixture(scope="session")
def sphere():
    return algebra("sphere").kp


@pytest.fixture(scope="session")
def plane_x():
    return algebra("plane-lambda-x").kp


@pytest.fixture(scope="session")
def plane_flat():
    return algebra("plane-flat").kp


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
