import numpy as np
import pytest

from qifkit.core import Channel, Prior


def bsc(p: float) -> Channel:
    """Binary symmetric channel with crossover probability p."""
    return Channel([[1.0 - p, p], [p, 1.0 - p]])


def random_prior(rng: np.random.Generator, dim: int) -> Prior:
    return Prior(rng.dirichlet(np.ones(dim)))


def random_channel(rng: np.random.Generator, n_in: int, n_out: int) -> Channel:
    return Channel(rng.dirichlet(np.ones(n_out), size=n_in))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240901)
