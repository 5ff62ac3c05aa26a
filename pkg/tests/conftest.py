from __future__ import annotations

from pathlib import Path

import pytest

from ttpnr.fixtures import example1
from ttpnr.net import build_net

DATA = Path(__file__).parent / "data"


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex1_net(ex1):
    return build_net(ex1)


@pytest.fixture
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
