"""Condition number of rank-revealing two-factor matrix decomposition.

A decomposition X = L R with L (m x k) and R (k x n), both of rank k.
The closed form depends only on singular values of L and R; the oracle
rebuilds the full Jacobian [I_m kron R^T, L kron I_n] and reads the
condition number off its SVD.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    InvalidRankError,
    RankPolicy,
    kron,
    numerical_rank,
    smallest_nonzero_sv,
    svd,
)

__all__ = [
    "TwoFactorPair",
    "TwoFactorCondReport",
    "cond_two_factor",
    "cond_two_factor_oracle",
    "two_factor_jacobian",
    "balanced_factorization",
]


@dataclass(frozen=True)
class TwoFactorPair:
    """Factor pair (L, R); both must have full rank k under the policy."""

    L: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.L, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        m, k = L.shape
        k2, n = R.shape
        if k != k2:
            raise ValueError(f"inner dimensions differ: L is {L.shape}, R is {R.shape}")
        if not (m >= k and n >= k and k >= 1):
            raise InvalidRankError(f"need m, n >= k >= 1, got m={m}, n={n}, k={k}")
        policy = RankPolicy.threshold()
        if numerical_rank(L, policy) < k or numerical_rank(R, policy) < k:
            raise InvalidRankError("L and R must both have full rank k")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "R", R)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.L.shape[0], self.R.shape[1], self.L.shape[1]


@dataclass(frozen=True)
class TwoFactorCondReport:
    kappa: float
    sigma_kL: float
    sigma_kR: float
    sigma_mL: float
    sigma_nR: float


def _sigma(s: np.ndarray, i: int) -> float:
    """i-th largest singular value, zero beyond the spectrum (1-based)."""
    return float(s[i - 1]) if i <= s.size else 0.0


def cond_two_factor(p: TwoFactorPair) -> TwoFactorCondReport:
    """Closed-form condition number of the decomposition at (L, R)."""
    m, n, k = p.shape
    sL = svd(p.L).singular_values
    sR = svd(p.R).singular_values
    sigma_kL, sigma_mL = _sigma(sL, k), _sigma(sL, m)
    sigma_kR, sigma_nR = _sigma(sR, k), _sigma(sR, n)
    low = min(sigma_kL**2 + sigma_nR**2, sigma_mL**2 + sigma_kR**2)
    return TwoFactorCondReport(
        kappa=1.0 / np.sqrt(low),
        sigma_kL=sigma_kL,
        sigma_kR=sigma_kR,
        sigma_mL=sigma_mL,
        sigma_nR=sigma_nR,
    )


def two_factor_jacobian(p: TwoFactorPair) -> np.ndarray:
    """Explicit Jacobian of (L, R) -> LR: [I_m kron R^T, L kron I_n]."""
    m, n, _ = p.shape
    return np.hstack([kron(np.eye(m), p.R.T), kron(p.L, np.eye(n))])


def structural_rank_two_factor(m: int, n: int, k: int) -> int:
    return m * n - (m - k) * (n - k)


def cond_two_factor_oracle(p: TwoFactorPair) -> float:
    """Condition number via the explicit Jacobian's SVD (independent of
    the closed form)."""
    m, n, k = p.shape
    j = two_factor_jacobian(p)
    policy = RankPolicy.structural(structural_rank_two_factor(m, n, k))
    return 1.0 / smallest_nonzero_sv(j, policy)


def balanced_factorization(x: np.ndarray, k: int) -> TwoFactorPair:
    """Optimally conditioned factorization from the truncated SVD.

    Returns (U sqrt(S), sqrt(S) V^T); the resulting condition number is
    sigma_k(x)^(-1/2), the best achievable over all factorizations.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if numerical_rank(x) < k:
        raise InvalidRankError(f"matrix rank below requested k={k}")
    res = svd(x)
    root = np.sqrt(res.singular_values[:k])
    return TwoFactorPair(L=res.left[:, :k] * root, R=(root * res.right[:, :k]).T)
