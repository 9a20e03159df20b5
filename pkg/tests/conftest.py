import random

import pytest
from hypothesis import HealthCheck, settings

from thetanorm.forms import diagonal_form, random_dense_form, random_diagonal_form

settings.register_profile(
    "default", max_examples=30, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)


@pytest.fixture
def three_squares():
    return diagonal_form([1, 1, 1])


@pytest.fixture
def four_squares():
    return diagonal_form([1, 1, 1, 1])


def small_form(seed: int, m: int, dense: bool):
    rng = random.Random(seed)
    if dense:
        return random_dense_form(rng, m, 6)
    return random_diagonal_form(rng, m, 9)
