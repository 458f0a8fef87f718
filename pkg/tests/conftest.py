import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record ``(criterion, ok, detail)``; the lines are printed in the terminal summary."""

    def record(criterion, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        _VERDICTS.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
