import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)

# classical example with an infinite-ratio outcome, a tied pair and a zero-ratio outcome
EXAMPLE_P = ("1/12", "1/2", "1/4", "1/12", "1/12", 0)
EXAMPLE_Q = (0, "1/12", "1/12", "1/6", "1/6", "1/2")

# 3x3 state whose complex conjugate is not a diagonal-phase rotation of it
RHO3 = np.array([[2, 1j, 1j], [-1j, 2, 1j], [-1j, -1j, 2]]) / 6
SIGMA3 = np.diag([1 / 2, 1 / 3, 1 / 6]).astype(complex)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
