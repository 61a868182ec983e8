"""Echo the acceptance checklist into the terminal summary of every run."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus):
    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    results = getattr(mod, "RESULTS", None) if mod else None
    if results:
        terminalreporter.section("acceptance checklist")
        for line in results:
            terminalreporter.line(line)
