import pytest

# criterion number -> (passed, summary), filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def record(number: int, passed: bool, summary: str) -> None:
    ACCEPTANCE[number] = (passed, summary)
    print(f"{'PASS' if passed else 'FAIL'} criterion {number}: {summary}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {summary}")


@pytest.fixture
def cap4():
    return 4
