"""Orthogonal Tucker decomposition machinery.

Reconstruction, sequentially truncated HOSVD, the closed-form condition
numbers in the absolute and relative metrics, and an explicit-Jacobian
oracle built from orthonormal tangent bases of the Stiefel factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .linalg import (
    InvalidRankError,
    RankPolicy,
    fold,
    multilinear_multiply,
    multilinear_rank,
    smallest_nonzero_sv,
    unfold,
)

__all__ = [
    "TuckerDecomposition",
    "TuckerCondReport",
    "tucker_reconstruct",
    "st_hosvd",
    "cond_tucker",
    "cond_tucker_oracle",
    "tucker_jacobian",
    "tucker_coordinate_map",
    "tucker_fiber_rotate",
    "structural_rank_tucker",
]

Metric = Literal["absolute", "relative"]

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class TuckerDecomposition:
    """Orthonormal factors U_i (n_i x k_i) plus a full-multilinear-rank core."""

    factors: tuple[np.ndarray, ...]
    core: np.ndarray

    def __post_init__(self):
        factors = tuple(np.atleast_2d(np.asarray(u, dtype=float)) for u in self.factors)
        core = np.asarray(self.core, dtype=float)
        if len(factors) != core.ndim:
            raise ValueError(f"{len(factors)} factors for an order-{core.ndim} core")
        for i, u in enumerate(factors):
            n, k = u.shape
            if k != core.shape[i]:
                raise ValueError(f"factor {i} has {k} columns, core dim is {core.shape[i]}")
            if k > n:
                raise InvalidRankError(f"factor {i}: k={k} exceeds n={n}")
            if np.max(np.abs(u.T @ u - np.eye(k))) > ORTHO_TOL:
                raise ValueError(f"factor {i} does not have orthonormal columns")
        if multilinear_rank(core) != core.shape:
            raise InvalidRankError("core does not have full multilinear rank")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "core", core)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.factors)

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.core.shape


@dataclass(frozen=True)
class TuckerCondReport:
    kappa_abs: float
    kappa_rel: float
    sigma: float
    per_mode_sigma: tuple[float, ...]
    x_norm: float


def tucker_reconstruct(d: TuckerDecomposition) -> np.ndarray:
    return multilinear_multiply(list(d.factors), d.core)


def st_hosvd(x: np.ndarray, ranks: tuple[int, ...]) -> TuckerDecomposition:
    """Sequentially truncated HOSVD at the given multilinear rank.

    Processes modes in increasing index: SVD of the partial core's
    unfolding, keep the leading left singular vectors, contract.
    """
    x = np.asarray(x, dtype=float)
    ranks = tuple(ranks)
    if len(ranks) != x.ndim:
        raise ValueError(f"{len(ranks)} ranks for an order-{x.ndim} tensor")
    if any(k > n for k, n in zip(ranks, x.shape)):
        raise InvalidRankError(f"ranks {ranks} exceed dims {x.shape}")
    core = x
    factors = []
    for mode, k in enumerate(ranks):
        u, _, _ = np.linalg.svd(unfold(core, mode), full_matrices=False)
        u = u[:, :k]
        factors.append(u)
        shape = core.shape[:mode] + (k,) + core.shape[mode + 1:]
        core = fold(u.T @ unfold(core, mode), mode, shape)
    if multilinear_rank(core) != ranks:
        raise InvalidRankError("truncated core is rank-deficient")
    return TuckerDecomposition(factors=tuple(factors), core=core)


def _per_mode_sigmas(d: TuckerDecomposition) -> tuple[float, ...]:
    """sigma_{k_i}(S_(i)) for every mode with k_i < n_i."""
    out = []
    for i, (k, n) in enumerate(zip(d.ranks, d.dims)):
        if k < n:
            s = np.linalg.svd(unfold(d.core, i), compute_uv=False)
            out.append(float(s[k - 1]))
    return tuple(out)


def cond_tucker(d: TuckerDecomposition, metric: Metric = "absolute") -> TuckerCondReport:
    """Closed-form condition number of the decomposition.

    Requires k_i < n_i for at least one mode; the square case is
    outside the hypothesis and rejected.
    """
    if metric not in ("absolute", "relative"):
        raise ValueError(f"unknown metric {metric!r}")
    per_mode = _per_mode_sigmas(d)
    if not per_mode:
        raise InvalidRankError("k_i = n_i for every mode: condition number undefined")
    sigma = min(per_mode)
    x_norm = float(np.linalg.norm(d.core))
    return TuckerCondReport(
        kappa_abs=max(1.0 / sigma, 1.0),
        kappa_rel=x_norm / sigma,
        sigma=sigma,
        per_mode_sigma=per_mode,
        x_norm=x_norm,
    )


def _skew_basis(k: int) -> list[np.ndarray]:
    """Orthonormal basis of k x k skew-symmetric matrices, lexicographic."""
    out = []
    for p in range(k):
        for q in range(p + 1, k):
            b = np.zeros((k, k))
            b[p, q] = 1.0 / np.sqrt(2.0)
            b[q, p] = -1.0 / np.sqrt(2.0)
            out.append(b)
    return out


def _complement(u: np.ndarray) -> np.ndarray:
    """Columns completing u to an orthogonal matrix (full QR)."""
    n, k = u.shape
    if n == k:
        return np.zeros((n, 0))
    q, _ = np.linalg.qr(u, mode="complete")
    # re-orthogonalize the trailing block against u to guard roundoff
    perp = q[:, k:]
    perp = perp - u @ (u.T @ perp)
    q2, _ = np.linalg.qr(perp)
    return q2


def _tangent_directions(d: TuckerDecomposition) -> list[list[np.ndarray]]:
    """Per mode: orthonormal basis of the Stiefel tangent space at U_i,
    skew blocks first, then complement blocks."""
    all_dirs = []
    for u in d.factors:
        n, k = u.shape
        dirs = [u @ om for om in _skew_basis(k)]
        perp = _complement(u)
        for p in range(n - k):
            for q in range(k):
                v = np.zeros((n - k, k))
                v[p, q] = 1.0
                dirs.append(perp @ v)
        all_dirs.append(dirs)
    return all_dirs


def structural_rank_tucker(dims: tuple[int, ...], ranks: tuple[int, ...]) -> int:
    return int(np.prod(ranks)) + sum(k * (n - k) for k, n in zip(ranks, dims))


def tucker_jacobian(d: TuckerDecomposition, metric: Metric = "absolute") -> np.ndarray:
    """Jacobian of the decomposition map in orthonormal coordinates.

    Columns: per mode the Stiefel tangent directions, then the scaled
    canonical core directions. Output coordinates are divided by the
    metric scale alpha (1 for absolute, ||S||_F for relative).
    """
    alpha = 1.0 if metric == "absolute" else float(np.linalg.norm(d.core))
    factors = list(d.factors)
    cols = []
    for i, dirs in enumerate(_tangent_directions(d)):
        for xi in dirs:
            fs = factors.copy()
            fs[i] = xi
            cols.append(multilinear_multiply(fs, d.core).ravel() / alpha)
    # Core directions: columns of kron(U_1, ..., U_D); the alpha on the
    # basis cancels against the output scaling.
    big = factors[0]
    for u in factors[1:]:
        big = np.kron(big, u)
    cols.extend(big.T)
    return np.column_stack(cols)


def tucker_coordinate_map(
    d: TuckerDecomposition, metric: Metric = "absolute"
) -> Callable[[np.ndarray], np.ndarray]:
    """Map from tangent coordinates to the output tensor (flattened).

    Linear-in-ambient parametrization; its Jacobian at zero equals
    :func:`tucker_jacobian`.
    """
    alpha = 1.0 if metric == "absolute" else float(np.linalg.norm(d.core))
    dirs = _tangent_directions(d)
    sizes = [len(ds) for ds in dirs]
    core_size = d.core.size

    def fn(theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        factors = []
        off = 0
        for u, ds, sz in zip(d.factors, dirs, sizes):
            v = u.copy()
            for c, xi in zip(theta[off:off + sz], ds):
                v = v + c * xi
            factors.append(v)
            off += sz
        core = d.core + alpha * theta[off:off + core_size].reshape(d.ranks)
        return multilinear_multiply(factors, core).ravel() / alpha

    return fn


def cond_tucker_oracle(d: TuckerDecomposition, metric: Metric = "absolute") -> float:
    """Condition number from the explicit Jacobian's SVD (independent of
    the closed form)."""
    j = tucker_jacobian(d, metric)
    policy = RankPolicy.structural(structural_rank_tucker(d.dims, d.ranks))
    return 1.0 / smallest_nonzero_sv(j, policy)


def tucker_fiber_rotate(
    d: TuckerDecomposition, rotations: list[np.ndarray]
) -> TuckerDecomposition:
    """Move along the solution fiber: (U_i Q_i^T, (Q_1 kron ... kron Q_D) S).

    Leaves the reconstructed tensor unchanged.
    """
    if len(rotations) != len(d.factors):
        raise ValueError("one rotation per mode required")
    qs = [np.asarray(q, dtype=float) for q in rotations]
    for i, (q, k) in enumerate(zip(qs, d.ranks)):
        if q.shape != (k, k):
            raise ValueError(f"rotation {i} has shape {q.shape}, expected {(k, k)}")
        if np.max(np.abs(q.T @ q - np.eye(k))) > ORTHO_TOL:
            raise ValueError(f"rotation {i} is not orthogonal")
    factors = tuple(u @ q.T for u, q in zip(d.factors, qs))
    return TuckerDecomposition(factors=factors, core=multilinear_multiply(qs, d.core))
