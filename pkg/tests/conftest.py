"""Shared test configuration and the acceptance-line reporter."""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# One line per acceptance criterion, echoed after capture ends so the
# verdicts are visible in a plain `pytest -v` log.
ACCEPTANCE_LINES: list[str] = []


def criterion(num: int, passed: bool, detail: str) -> bool:
    line = f"criterion {num}: {'PASS' if passed else 'FAIL'} ({detail})"
    print(line, flush=True)
    ACCEPTANCE_LINES.append(line)
    return passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES,
                           key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
