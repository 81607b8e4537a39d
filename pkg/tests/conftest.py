"""Repeat the acceptance PASS/FAIL lines in the terminal summary."""

_LINES = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _LINES.extend(ln for ln in report.capstdout.splitlines() if ln.startswith(("[PASS]", "[FAIL]")))


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
