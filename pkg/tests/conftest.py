import numpy as np
import pytest

from wolfflab import QuadratureConfig, params


@pytest.fixture(scope="session")
def pp3():
    """Workhorse parameter set: n=3, p=2, q=1/2, gamma=1."""
    return params(3, 2.0, 0.5, 1.0)


@pytest.fixture(scope="session")
def quad():
    return QuadratureConfig()


@pytest.fixture(scope="session")
def suite_quad():
    """Leaner grid for randomized suites; doubling it reproduces the
    default density."""
    return QuadratureConfig(points_per_decade=32)


@pytest.fixture(scope="session")
def np_grid_params():
    """(n, p) combinations exercised by the closed-form checks."""
    return [(3, 2.0), (4, 3.0), (5, 2.5)]


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
