import numpy as np
import pytest

from selfappraisal.scenarios import C1, C2


@pytest.fixture
def c1():
    return C1


@pytest.fixture
def c2():
    return C2


def random_stochastic(rng, n, doubly=False):
    """Zero-diagonal row-stochastic matrix with random support."""
    from selfappraisal.scenarios import random_doubly_stochastic

    if doubly:
        return random_doubly_stochastic(n, rng).weights
    c = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
    np.fill_diagonal(c, 0.0)
    for i in range(n):
        if c[i].sum() == 0:
            c[i, (i + 1) % n] = 1.0
    return c / c.sum(axis=1, keepdims=True)


def random_simplex(rng, n):
    return rng.dirichlet(np.ones(n))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
