import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, ok, detail)."""
    def record(n, ok, detail):
        _LINES[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_LINES[n])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_LINES):
            terminalreporter.write_line(_LINES[n])
