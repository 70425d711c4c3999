import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and (
            report.when == "call" or report.outcome != "passed"):
        _CRITERIA.append(report)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for report in _CRITERIA:
        name = report.nodeid.split("::test_criterion_")[1]
        number, _, label = name.partition("_")
        verdict = "PASS" if report.passed else "FAIL"
        terminalreporter.write_line(f"criterion {int(number):2d} {verdict}  {label.replace('_', ' ')}")
