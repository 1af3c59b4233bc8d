import pytest

from dtl import DistributedSignature

_CRITERIA: dict = {}


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} - {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])


@pytest.fixture
def sig_ij():
    return DistributedSignature(["i", "j"], {"i": ["p", "r"], "j": ["q", "s"]})


@pytest.fixture
def sig_i():
    return DistributedSignature(["i"], {"i": ["p", "q"]})
