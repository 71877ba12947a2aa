import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ringcavity.model import PhysicalParams

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def ref_params():
    return PhysicalParams.operating_point()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T
