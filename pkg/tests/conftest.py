import warnings

import numpy as np
import pytest

from negcontrol.model import SemParams
from negcontrol.simulate import SimConfig, simulate


def sim(n=2000, seed=0, **params):
    return simulate(SimConfig(SemParams(**params), n, seed))


@pytest.fixture
def derived_data():
    return sim(5000, 11)


@pytest.fixture(autouse=True)
def _quiet_weak_proxy():
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        yield


def within_se(est, truth, se, k=3.0):
    return abs(est - truth) <= k * se


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
