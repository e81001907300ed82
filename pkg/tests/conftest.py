"""Collects the acceptance verdicts and prints them after the run."""

import pytest

ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record one acceptance line; ``record(ok, detail)`` also asserts."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
