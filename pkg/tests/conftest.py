"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import re

_results: dict[int, tuple[str, str]] = {}
_pattern = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _pattern.search(report.nodeid)
    if not m:
        return
    number = int(m.group(1))
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        label = _results.get(number, ("", report.nodeid.split("::")[-1]))[1]
        status = "FAIL" if failed or _results.get(number, ("PASS",))[0] == "FAIL" else "PASS"
        _results[number] = (status, label)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        status, label = _results[number]
        terminalreporter.write_line(f"{status}  criterion {number:2d}  {label}")
