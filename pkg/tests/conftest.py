"""Shared fixtures and the acceptance-criteria summary.

Tests marked ``@pytest.mark.acceptance(number, title)`` are grouped by
criterion; after the run one PASS/FAIL/SKIP line per criterion is printed.
A criterion passes when none of its checks failed and at least one ran.
"""

from __future__ import annotations

import pytest

_ACCEPTANCE: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "passed": 0, "failed": 0, "skipped": []})
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if rep.passed:
            entry["passed"] += 1
        elif rep.skipped:
            reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
            entry["skipped"].append(f"{item.name}: {reason.removeprefix('Skipped: ')}")
        else:
            entry["failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        total = e["passed"] + e["failed"]
        if e["failed"]:
            status = "FAIL"
        elif e["passed"]:
            status = "PASS"
        else:
            status = "SKIP"
        line = f"[{status}] {number:2d}. {e['title']} ({e['passed']}/{total} checks passed)"
        terminalreporter.write_line(line)
        for reason in e["skipped"]:
            terminalreporter.write_line(f"         skipped {reason}")
