"""Collects acceptance verdicts and prints them after the run."""
import pytest

VERDICTS = []


@pytest.fixture
def verdict():
    """Record ``(criterion, ok, detail)``, print it and fail the test when not ok."""
    def record(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        VERDICTS.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
