"""Shared test plumbing.

test_acceptance.py records one PASS/FAIL line per criterion before asserting,
so the scoreboard below prints even when a criterion is left failing.
"""

ACCEPTANCE_LINES = []


def record_acceptance(name, passed, detail=""):
    tag = "PASS" if passed else "FAIL"
    line = f"[{tag}] {name}"
    if detail:
        line += f": {detail}"
    ACCEPTANCE_LINES.append(line)
    return passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
