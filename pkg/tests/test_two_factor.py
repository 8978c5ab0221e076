import numpy as np
import pytest

from conftest import random_orthogonal, random_two_factor
from lscond import (
    InvalidRankError,
    TwoFactorPair,
    balanced_factorization,
    cond_two_factor,
    cond_two_factor_oracle,
)
from lscond.two_factor import structural_rank_two_factor, two_factor_jacobian


class TestPairValidation:
    def test_rejects_rank_deficient(self):
        with pytest.raises(InvalidRankError):
            TwoFactorPair(L=np.zeros((3, 2)), R=np.eye(2))

    def test_rejects_k_above_dims(self):
        with pytest.raises(InvalidRankError):
            TwoFactorPair(L=np.ones((1, 2)), R=np.ones((2, 3)))

    def test_report_recomputable(self):
        p = random_two_factor(4, 3, 2, 0)
        rep = cond_two_factor(p)
        low = min(rep.sigma_kL**2 + rep.sigma_nR**2, rep.sigma_mL**2 + rep.sigma_kR**2)
        assert rep.kappa == pytest.approx(1.0 / np.sqrt(low), abs=1e-14 * rep.kappa)


class TestClosedForm:
    def test_identity_square(self):
        p = TwoFactorPair(L=np.eye(2), R=np.eye(2))
        assert cond_two_factor(p).kappa == pytest.approx(1.0 / np.sqrt(2.0))

    def test_unit_vectors_k1(self):
        p = TwoFactorPair(L=np.array([[1.0], [0.0]]), R=np.array([[1.0, 0.0]]))
        assert cond_two_factor(p).kappa == pytest.approx(1.0)

    def test_k_below_min_branch(self):
        p = random_two_factor(5, 4, 2, 3)
        sL = np.linalg.svd(p.L, compute_uv=False)[-1]
        sR = np.linalg.svd(p.R, compute_uv=False)[-1]
        assert cond_two_factor(p).kappa == pytest.approx(1.0 / min(sL, sR), rel=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("shape", [(4, 3, 2), (5, 5, 5), (6, 4, 4), (3, 3, 1)])
    def test_matches_oracle(self, shape, seed):
        m, n, k = shape
        p = random_two_factor(m, n, k, 100 * seed + m + 10 * n + 100 * k)
        closed = cond_two_factor(p).kappa
        oracle = cond_two_factor_oracle(p)
        assert closed == pytest.approx(oracle, rel=1e-8)


class TestOracle:
    def test_identity_spectrum(self):
        p = TwoFactorPair(L=np.eye(2), R=np.eye(2))
        s = np.linalg.svd(two_factor_jacobian(p), compute_uv=False)
        assert np.allclose(s, np.sqrt(2.0))
        assert cond_two_factor_oracle(p) == pytest.approx(1.0 / np.sqrt(2.0))

    def test_spectrum_is_pairwise_sum_of_squares(self):
        # sigma(J) = {sqrt(sigma_i(L)^2 + sigma_j(R)^2)} as a multiset
        L = np.zeros((3, 2))
        L[0, 0], L[1, 1] = 2.0, 1.0
        p = TwoFactorPair(L=L, R=np.eye(2))
        sL = np.concatenate([np.linalg.svd(L, compute_uv=False), [0.0]])
        sR = np.array([1.0, 1.0])
        expected = np.sort(
            [np.sqrt(a**2 + b**2) for a in sL for b in sR]
        )[::-1]
        got = np.linalg.svd(two_factor_jacobian(p), compute_uv=False)
        assert np.allclose(np.sort(got)[::-1], expected, atol=1e-10)

    def test_structural_rank_count(self):
        p = random_two_factor(4, 3, 2, 77)
        s = np.linalg.svd(two_factor_jacobian(p), compute_uv=False)
        expected = structural_rank_two_factor(4, 3, 2)
        assert expected == 10
        assert int(np.count_nonzero(s > 1e-8)) == expected


class TestBalanced:
    @pytest.mark.parametrize(
        "diag,expected", [([4.0, 1.0, 0.0], 1.0), ([9.0, 4.0, 0.0], 0.5)]
    )
    def test_diagonal(self, diag, expected):
        # k < min(m, n): kappa of the balanced pair is sigma_k(x)^(-1/2)
        p = balanced_factorization(np.diag(diag), 2)
        assert cond_two_factor(p).kappa == pytest.approx(expected, rel=1e-12)

    def test_square_case_beats_sigma_k_bound(self):
        # with k = min(m, n) both closed-form branches stay nonzero and
        # the balanced pair is better-conditioned than sigma_k(x)^(-1/2)
        p = balanced_factorization(np.diag([4.0, 1.0]), 2)
        assert cond_two_factor(p).kappa == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)

    def test_equals_sigma_k_inverse_sqrt(self, rng):
        x = rng.standard_normal((5, 4))
        k = 3
        p = balanced_factorization(x, k)
        sk = np.linalg.svd(x, compute_uv=False)[k - 1]
        assert cond_two_factor(p).kappa == pytest.approx(sk**-0.5, rel=1e-10)

    def test_optimality_over_gauge(self, rng):
        x = rng.standard_normal((5, 3)) @ rng.standard_normal((3, 4))
        p = balanced_factorization(x, 3)
        best = cond_two_factor(p).kappa
        for _ in range(100):
            m = rng.standard_normal((3, 3)) + 3 * np.eye(3)
            alt = TwoFactorPair(L=p.L @ m, R=np.linalg.solve(m, p.R))
            assert best <= cond_two_factor(alt).kappa + 1e-10

    def test_rank_too_low(self, rng):
        x = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 4))
        with pytest.raises(InvalidRankError):
            balanced_factorization(x, 3)


class TestInvariants:
    def test_isometry_invariance(self, rng):
        p = random_two_factor(5, 4, 3, 9)
        base = cond_two_factor(p).kappa
        for _ in range(10):
            q = random_orthogonal(3, rng)
            rotated = TwoFactorPair(L=p.L @ q, R=q.T @ p.R)
            assert cond_two_factor(rotated).kappa == pytest.approx(base, rel=1e-12)

    def test_sigma_k_bound(self):
        # min singular value of either factor is at most sqrt(sigma_k(X))
        for seed in range(50):
            p = random_two_factor(5, 4, 3, 500 + seed)
            x = p.L @ p.R
            sk = np.linalg.svd(x, compute_uv=False)[2]
            skL = np.linalg.svd(p.L, compute_uv=False)[2]
            skR = np.linalg.svd(p.R, compute_uv=False)[2]
            assert min(skL, skR) <= np.sqrt(sk) + 1e-10

    def test_balanced_kappa_matches_boundary_distance(self, rng):
        # kappa^-2 of the balanced factorization equals the spectral
        # distance from X to the rank-deficient boundary
        x = rng.standard_normal((6, 5))
        k = 4
        p = balanced_factorization(x, k)
        kappa = cond_two_factor(p).kappa
        sk = np.linalg.svd(x, compute_uv=False)[k - 1]
        assert kappa**-2 == pytest.approx(sk, abs=1e-10)
