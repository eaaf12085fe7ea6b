import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + z.conj().T)


def random_complex(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_psd(rng, n, lo=0.1, hi=10.0):
    q, _ = np.linalg.qr(random_complex(rng, n))
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    m = (q * lam) @ q.conj().T
    return 0.5 * (m + m.conj().T)
