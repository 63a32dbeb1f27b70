import pytest

_LINES = []


@pytest.fixture(scope="session")
def report():
    """Record one acceptance line: report(tag, ok, detail)."""

    def _add(tag, ok, detail):
        _LINES.append(f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}")
        return ok

    return _add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
