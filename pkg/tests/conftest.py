import pytest

from femtoloss import default_config

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def cfg():
    return default_config()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
