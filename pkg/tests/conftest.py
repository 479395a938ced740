import functools

import pytest

from qcpm.presets import PRESETS, preset, square_cluster
from qcpm.superspace import decompose


@functools.lru_cache(maxsize=None)
def dec_of(name):
    cluster = square_cluster() if name == "square" else preset(name)
    return decompose(cluster)


@pytest.fixture(params=PRESETS)
def any_dec(request):
    return dec_of(request.param)


# acceptance lines are collected here and printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
