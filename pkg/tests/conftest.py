import numpy as np
import pytest

from radiuslab.ensembles import standard_complex_gaussian


@pytest.fixture
def rng():
    return np.random.default_rng(20250811)


def random_matrix(rng, n):
    return standard_complex_gaussian(rng, (n, n))


def random_hermitian(rng, n):
    g = random_matrix(rng, n)
    return (g + g.conj().T) / 2.0


def random_psd(rng, n):
    g = random_matrix(rng, n)
    return g.conj().T @ g / n


def random_unit(rng, n):
    x = standard_complex_gaussian(rng, n)
    return x / np.linalg.norm(x)
