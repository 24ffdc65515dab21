import pytest

from latticekpp.dispersion import solve_dispersion
from latticekpp.reaction import make_logistic

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def disp():
    """Dispersion pair at unit reaction slope, used throughout."""
    return solve_dispersion(1.0)


@pytest.fixture(scope="session")
def logistic():
    return make_logistic(1.0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
