import numpy as np
import pytest
from scipy.stats import unitary_group

from schurcomm.operators import HermitianOperator


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


def random_hermitian(rng, dim, radius=30.0, positive=False):
    lo = 0.0 if positive else -radius
    w = rng.uniform(lo, radius, dim)
    return HermitianOperator.from_spectrum(w, unitary_group.rvs(dim, random_state=rng))


def random_matrix(rng, dim, unit=True):
    y = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return y / np.linalg.norm(y, 2) if unit else y
