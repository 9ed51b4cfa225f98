import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hpd(rng, m, floor=1.0):
    """Random Hermitian positive-definite matrix of size m."""
    a = random_complex(rng, (m, m))
    return a @ a.conj().T + floor * np.eye(m)
