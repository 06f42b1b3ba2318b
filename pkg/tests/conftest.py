import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from helpers import D1, D2, D3, diamond  # noqa: E402


@pytest.fixture
def g_diamond():
    return diamond()


@pytest.fixture
def d1():
    return D1


@pytest.fixture
def d2():
    return D2


@pytest.fixture
def d3():
    return D3


def pytest_terminal_summary(terminalreporter):
    from helpers import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
