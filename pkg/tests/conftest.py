"""Shared pytest wiring: print an acceptance scoreboard after every run."""

from __future__ import annotations

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    _ACCEPTANCE_RESULTS.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance scoreboard")
    for name, outcome in sorted(_ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{outcome:6s} {name}")
