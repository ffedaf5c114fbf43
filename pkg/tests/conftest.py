import numpy as np
import pytest

from helpers import reachable_curves


@pytest.fixture(scope="session")
def small_curves():
    return reachable_curves(16, 1.5, 60, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
