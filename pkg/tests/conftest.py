import numpy as np
import pytest

from lscond import TuckerDecomposition, TwoFactorPair


def random_tucker(dims, ranks, seed) -> TuckerDecomposition:
    rng = np.random.default_rng(seed)
    factors = tuple(
        np.linalg.qr(rng.standard_normal((n, k)))[0] for n, k in zip(dims, ranks)
    )
    core = rng.standard_normal(tuple(ranks))
    core /= np.linalg.norm(core)
    return TuckerDecomposition(factors=factors, core=core)


def random_two_factor(m, n, k, seed) -> TwoFactorPair:
    rng = np.random.default_rng(seed)
    return TwoFactorPair(
        L=rng.standard_normal((m, k)), R=rng.standard_normal((k, n))
    )


def random_orthogonal(k, rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.sign(np.diag(r)) + 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
