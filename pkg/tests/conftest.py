from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from plusspace.field import RATIONAL, real_quadratic

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

Q = RATIONAL
Q5 = real_quadratic(5)


@pytest.fixture(params=[None, 5, 2], ids=["Q", "Q(sqrt5)", "Q(sqrt2)"])
def field(request):
    return RATIONAL if request.param is None else real_quadratic(request.param)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
