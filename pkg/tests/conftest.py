import sys

import pytest

from relcx.funcx import FunctionComplexes
from relcx.geomodel import PointModel, Variety
from relcx.ordsets import FiniteOrderedSet


def two_base_model(n: int = 4) -> PointModel:
    """Four small varieties over S = {s, t}, three of them with a boundary point over u."""
    vs = {
        1: Variety("X1", (("a", "s"), ("b", "t")), (("a'", "u"),)),
        2: Variety("X2", (("c", "s"), ("d", "t")), (("c'", "u"),)),
        3: Variety("X3", (("e", "s"), ("f", "s")), (("e'", "u"),)),
        4: Variety("X4", (("g", "t"), ("h", "s"))),
    }
    vs = {i: vs[i] for i in range(1, n + 1)}
    return PointModel(("s", "t"), ("s", "t", "u"), vs, [0] * (n - 1), FiniteOrderedSet.range(1, n))


@pytest.fixture(scope="session")
def model4():
    return two_base_model(4)


@pytest.fixture(scope="session")
def fc4(model4):
    return FunctionComplexes(model4)


@pytest.fixture(scope="session")
def const_variety():
    return Variety("X", (("p", "s"), ("q", "t"), ("w", "s")), (("r", "u"),))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance"):
            lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
