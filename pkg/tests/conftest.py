import pytest

from chp.textio import fixture

RESULTS = []


def record(criterion, description, ok):
    """Log one acceptance line; the summary prints them all at the end."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {description}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fx():
    return fixture
