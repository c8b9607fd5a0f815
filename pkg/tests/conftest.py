import pytest

ACCEPTANCE = []


@pytest.fixture
def report():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def _report(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
