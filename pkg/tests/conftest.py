import numpy as np
import pytest

from procmaxent.linalg import dag


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(n, rng):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    R = G @ dag(G)
    return R / np.trace(R).real


def random_hermitian(n, rng, scale=1.0):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (G + dag(G))


def random_unitary(n, rng):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_unit_vector(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)
