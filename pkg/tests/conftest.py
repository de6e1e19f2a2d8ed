import numpy as np
import pytest


def random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_hermitian(rng, n):
    a = random_matrix(rng, n)
    return a + a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
