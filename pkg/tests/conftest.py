import numpy as np
import pytest

from chillrto.plant import default_plant, plant_boxes
from chillrto.rto import AlgoConfig, initialize_safe_seeds


@pytest.fixture(scope="session")
def specs():
    return default_plant()


@pytest.fixture(scope="session")
def boxes(specs):
    return plant_boxes(specs)


@pytest.fixture(scope="session")
def algo():
    return AlgoConfig()


@pytest.fixture(scope="session")
def _seeded(specs):
    return initialize_safe_seeds(specs, 5.0)


@pytest.fixture(scope="session")
def seed_obs(_seeded):
    """Per-compressor commissioning observations."""
    return _seeded[0]


@pytest.fixture(scope="session")
def seeded_models(_seeded):
    """Models fitted on the commissioning seeds."""
    return _seeded[1]


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
