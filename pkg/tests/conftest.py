import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, passed: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
