import numpy as np
import pytest

from zenolab.lattice import ChainGeometry, SitePureState, XYParameters

# pass/fail lines collected by test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def xy():
    return XYParameters(J=1.0, h=0.5)


@pytest.fixture
def chain5():
    return ChainGeometry(-2, 2)


@pytest.fixture
def plus_state():
    return SitePureState.normalized([1, 1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
