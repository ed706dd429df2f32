import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def blinker5():
    b = np.zeros((5, 5), dtype=np.uint8)
    b[1:4, 2] = 1
    return b


# ---------------------------------------------------------------------------
# acceptance reporting: tests marked ``acceptance(n, text)`` get one
# PASS/FAIL line each in the terminal summary


class _Criterion:
    def __init__(self, number, text):
        self.number = number
        self.text = text
        self.detail = ""
        self.passed = None


_CRITERIA: dict[int, _Criterion] = {}


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker is None:
        raise RuntimeError("the criterion fixture needs an acceptance marker")
    c = _Criterion(*marker.args)
    _CRITERIA[c.number] = c
    request.node.criterion = c
    return c


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    c = getattr(item, "criterion", None)
    if c is not None and rep.when == "call":
        c.passed = rep.passed
        if rep.failed and not c.detail:
            c.detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        c = _CRITERIA[n]
        status = "PASS" if c.passed else "FAIL"
        tr.write_line(f"{status} criterion {n:2d}: {c.text} | {c.detail}")
