"""Acceptance bookkeeping: one PASS/FAIL line per criterion at session end."""

from __future__ import annotations

CRITERIA = {
    1: "isotonic fit equals brute-force partition oracle",
    2: "monotonicity / idempotence / weighted-mean blocks",
    3: "CEC identity",
    4: "CEC known cost shift",
    5: "CEC symmetry",
    6: "serialization round trip and golden files",
    7: "mixing statistics",
    8: "plan invariants and leaderboard grid",
    9: "CLI end to end",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _outcomes.setdefault(marker.args[0], []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        status = "NOT RUN" if not results else ("PASS" if all(results) else "FAIL")
        terminalreporter.write_line(f"AC{n} {status:7} {title}")
