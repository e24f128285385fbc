"""Shared fixtures and the acceptance-summary reporting hook."""

ACCEPTANCE_RESULTS = []


def record_acceptance(name: str, passed: bool, detail: str = ""):
    """Collect one acceptance-criterion verdict for the terminal summary."""
    suffix = f" ({detail})" if detail else ""
    ACCEPTANCE_RESULTS.append(f"[acceptance] {name}: {'PASS' if passed else 'FAIL'}{suffix}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
