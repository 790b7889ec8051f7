import math

import pytest

PI2 = math.pi ** 2


@pytest.fixture(scope="session")
def nystrom_reference():
    """c_alpha from the corrected Nystrom route, alpha = 1..8, cached for the session."""
    from calpha.green import c_alpha_by_nystrom

    return {a: c_alpha_by_nystrom(a, 300 if a == 3 else 200) for a in range(1, 9)}


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call with (number, passed, detail)."""

    def record(number, passed, detail):
        _ACCEPTANCE.append((number, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}")
