import pytest

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed:
        prev = _acceptance.get(name)
        if prev is None or prev[0] == "PASS":
            _acceptance[name] = ("PASS" if report.passed else "FAIL", report)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        outcome, _ = _acceptance[name]
        terminalreporter.write_line(f"{name}: {outcome}")
