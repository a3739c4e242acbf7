import numpy as np
import pytest

from nhgp import DiskParams, FreeParticle, VerticalRollingDisk


@pytest.fixture
def disk():
    return VerticalRollingDisk(DiskParams())


@pytest.fixture
def free_particle():
    return FreeParticle(n=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240819)


def random_disk_configs(rng, count, low=-2.0, high=2.0):
    q = np.zeros((count, 4))
    q[:, 2:] = rng.uniform(low, high, size=(count, 2))
    q[:, :2] = rng.uniform(-1.0, 1.0, size=(count, 2))
    return q
