"""Shared pytest hooks.

Tests in ``test_acceptance.py`` attach a one-line summary through
``record_property("criterion", ...)``; the terminal summary prints one
PASS/FAIL line per criterion after the run.
"""

import re

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not match:
        return
    num = int(match.group(1))
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = dict(report.user_properties).get("criterion", "")
        if report.skipped:
            status = "SKIP"
        else:
            status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE[num] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {detail}")
