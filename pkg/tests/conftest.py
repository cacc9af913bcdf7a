import numpy as np
import pytest

from xyentangle.model import Boundary, ChainSpec

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def ring(n, h=0.0, kt=0.0, boundary=Boundary.PERIODIC):
    return ChainSpec(n_sites=n, coupling=1.0, uniform_field=h, temperature=kt, boundary=boundary)
