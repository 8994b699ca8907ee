import numpy as np
import pytest
from hypothesis import settings

from hybridslide import HybridModel, SwitchingFunction

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")


def planar(flows, gammas, names=None):
    """Small model from plain callables; gradients fall back to finite differences."""
    sw = [SwitchingFunction(f"g{j}", g) for j, g in enumerate(gammas)]
    n = len(names) if names else 2
    return HybridModel(sw, flows, names or ("x1", "x2")[:n])


def const_flows_1d(f_minus, f_plus, n=2):
    """One switching function ``x1``; constant flows with given first components."""
    def make(v):
        return lambda x: np.r_[v, np.zeros(n - 1)]

    sw = SwitchingFunction("a", lambda x: x[0], gradient=lambda x: np.eye(n)[0])
    return HybridModel([sw], [make(f_minus), make(f_plus)], tuple(f"x{k + 1}" for k in range(n)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
