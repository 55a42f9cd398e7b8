import pytest

from h2blend.backend import available_drivers

DRIVERS = available_drivers()

requires_highs = pytest.mark.skipif("highs" not in DRIVERS, reason="HiGHS not available")
requires_cbc = pytest.mark.skipif("cbc" not in DRIVERS, reason="CBC not available")

# filled by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
