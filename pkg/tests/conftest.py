import numpy as np
import pytest

from procaqm.mode_algebra import PhysicsConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cfg():
    return PhysicsConfig(1.3, 0.7, 1.1)


@pytest.fixture
def unit_cfg():
    return PhysicsConfig(1.0, 1.0, 1.0)
