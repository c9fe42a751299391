import itertools
import math

import pytest

from coexlab.model import Scenario
from coexlab.phy_timing import WifiTrafficProfile

ACCEPTANCE_LINES: list[str] = []


def enumerate_slot_probs(taus):
    """Brute force over all 2^n transmit patterns: (p_idle, p_single, p_multi, per-station success)."""
    n = len(taus)
    p_idle = p_single = p_multi = 0.0
    succ = [0.0] * n
    for pattern in itertools.product((0, 1), repeat=n):
        p = math.prod(t if z else 1 - t for z, t in zip(pattern, taus))
        k = sum(pattern)
        if k == 0:
            p_idle += p
        elif k == 1:
            p_single += p
            succ[pattern.index(1)] += p
        else:
            p_multi += p
    return p_idle, p_single, p_multi, succ


@pytest.fixture
def fig2_point():
    def make(n=1, t_on=10.0, n_agg=1, scheme="csat", **kw):
        return Scenario(n=n, t_on=t_on, traffic=WifiTrafficProfile(n_agg), scheme=scheme, **kw)
    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
