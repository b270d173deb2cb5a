import numpy as np
import pytest

from posmaps.positivity import EnsembleConfig, sample_cptp
from posmaps.superop import from_action

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cptp3():
    return sample_cptp(EnsembleConfig(dim=3, seed=77))


def brute_transfer(fn, d):
    """Transfer matrix tabulated column by column from the action on |j><k|."""
    return from_action(fn, d).transfer


def random_matrix(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
