import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BIT = np.array([[0.5, 0.0], [0.0, 0.5]])  # perfectly correlated uniform bit table


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bit_instance():
    from convexsplit import testkit as tk
    return tk.classical_embed(BIT), np.eye(2, dtype=complex) / 2


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
