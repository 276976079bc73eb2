"""Collects the one-line acceptance verdicts and prints them at the end of the run."""

import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record ``CRITERION n: PASS|FAIL detail`` for the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"CRITERION {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        _VERDICTS.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
