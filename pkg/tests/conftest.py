import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit(rng, dim):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def orthogonal_unit(rng, against):
    v = rng.normal(size=against.shape)
    v = v - np.vdot(v, against) * against
    return v / np.linalg.norm(v)
