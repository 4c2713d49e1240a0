import random

import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance(request):
    """Record one acceptance criterion: ``acceptance(label, passed, detail)``."""

    def record(label, passed, detail=""):
        _ACCEPTANCE[label] = (bool(passed), detail)
        request.node.user_properties.append((label, bool(passed)))
        return passed

    return record


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0])):
        passed, detail = _ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
