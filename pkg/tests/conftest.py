import pytest

from realstrata.candidates import enumerate_candidates, extract_weights
from realstrata.lie_core import preset

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def specs():
    return {name: preset(name) for name in ("sl2r", "sl3r", "sl2c", "sl3c")}


@pytest.fixture(scope="session")
def candidates(specs):
    return {name: enumerate_candidates(s, extract_weights(s)) for name, s in specs.items()}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
