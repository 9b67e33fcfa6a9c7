import math

import numpy as np
import pytest

from nearfield_isac import ArrayGeometry, paper_default, build_channels


@pytest.fixture(scope="session")
def geom256():
    return ArrayGeometry(256, 30e9)


@pytest.fixture(scope="session")
def scenario():
    return paper_default()


@pytest.fixture(scope="session")
def nf_channels(scenario):
    return build_channels(scenario, "near_field")


@pytest.fixture(scope="session")
def ff_channels(scenario):
    return build_channels(scenario, "far_field")


def brute_phase(delta, r, theta, lam):
    """Referenced spherical phase of one element, scalar math only."""
    rn = math.sqrt(r * r + delta * delta - 2 * r * delta * math.sin(theta))
    return -2 * math.pi * (rn - r) / lam


def wrap(x):
    return np.angle(np.exp(1j * np.asarray(x)))


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
