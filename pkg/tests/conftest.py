import pytest

# (criterion id, passed, detail) lines appended by the acceptance suite
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: int(t[0][2:])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}  {detail}")


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(cid: str, ok: bool, detail: str) -> None:
        line = (cid, bool(ok), detail)
        ACCEPTANCE_LINES.append(line)
        print(f"{'PASS' if ok else 'FAIL'}  {cid}  {detail}")
        assert ok, f"{cid}: {detail}"

    return record
