import numpy as np
import pytest
from hypothesis import settings

from finitepsido.group import Group

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SMALL_MODULI = [(4,), (6,), (8,), (12,), (2, 3), (4, 6)]


@pytest.fixture(params=SMALL_MODULI, ids=lambda m: "Z" + "xZ".join(map(str, m)))
def group(request):
    return Group(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
