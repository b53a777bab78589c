from fractions import Fraction as F

import pytest
from hypothesis import settings

from unitstate import geometry as geo
from unitstate import problem

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

S1 = ((0, F(1, 3), 1), (F(1, 3), 1, 1), (F(1, 9), F(8, 9), 1))
S2 = ((F(1, 2), F(1, 4), 1), (1, F(1, 2), 1))
S3 = ((F(1, 3), F(3, 5), 1), (F(1, 3), 1, 1))
S4 = ((F(1, 2), F(1, 2), 1),)
S5 = ((F(2, 7), F(1, 7), 1),)

TENT1 = "x1 \\/ (1 - x1)"


@pytest.fixture(scope="session")
def ex28():
    return problem.load("example28")


@pytest.fixture(scope="session")
def farey():
    return problem.load("farey")


@pytest.fixture(scope="session")
def square():
    return problem.load("square")


@pytest.fixture(scope="session")
def twopoint():
    return problem.load("twopoint")


@pytest.fixture
def segment():
    return geo.PolytopalComplex((((0, 1), (1, 1)),))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion and return the check result."""

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
