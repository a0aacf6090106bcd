import numpy as np
import pytest

from arraynmi import measured_model, uniform_model


@pytest.fixture(scope="session")
def measured():
    return measured_model()


@pytest.fixture(scope="session")
def uniform():
    return uniform_model()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
