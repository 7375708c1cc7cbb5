import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_bloch_vector(rng, pure=False):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if pure:
        return v
    return v * rng.uniform() ** (1.0 / 3.0)


def random_density_matrix(rng, pure=False):
    from qcert.qstate import bloch_to_density

    return bloch_to_density(random_bloch_vector(rng, pure=pure))
