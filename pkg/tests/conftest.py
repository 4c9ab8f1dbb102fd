import pytest

_LINES = []


@pytest.fixture
def report_criterion():
    """Record one pass/fail line for the terminal summary."""
    def record(number, passed, detail):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {str(number):>3}: {status}  {detail}"
        _LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")

    def order(line):
        tag = line.split()[1].rstrip(":")
        digits = "".join(ch for ch in tag if ch.isdigit())
        return int(digits), tag

    for line in sorted(_LINES, key=order):
        terminalreporter.write_line(line)
