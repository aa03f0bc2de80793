import numpy as np
import pytest

from twmghost.config import load_config


@pytest.fixture(scope="session")
def cfg():
    """Default run configuration (collinear degenerate geometry, 256x256 grid)."""
    return load_config()


@pytest.fixture(scope="session")
def geometry(cfg):
    return cfg.geometry


@pytest.fixture(scope="session")
def mask(cfg):
    return cfg.load_object_mask()


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
