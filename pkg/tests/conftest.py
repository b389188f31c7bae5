import math

import pytest

from varbound.scenarios import spin1_operators, theta_state

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def spin1():
    return spin1_operators()


@pytest.fixture
def psi_pi4():
    return theta_state(math.pi / 4)


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome for the terminal summary."""

    def record(label: str, passed: bool, detail: str = "") -> None:
        _CRITERIA.append((label, passed, detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {label} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
