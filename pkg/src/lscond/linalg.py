"""Dense matrix/tensor kernels: SVD, pseudoinverse, Kronecker products,
mode-k unfoldings, multilinear products, and seeded random generators.

Matrices and tensors are plain ``numpy.ndarray`` objects (C layout).
Flattening convention: ``unfold(t, mode)`` moves ``mode`` to the rows;
the columns enumerate the remaining modes in increasing mode index with
the earliest mode varying slowest (vec of the Kronecker order).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RankPolicy",
    "SvdResult",
    "NumericalError",
    "InvalidRankError",
    "svd",
    "pseudoinverse",
    "numerical_rank",
    "smallest_nonzero_sv",
    "kron",
    "unfold",
    "fold",
    "multilinear_multiply",
    "multilinear_rank",
    "rng_gaussian_matrix",
    "rng_orthonormal",
    "rng_unit_tensor",
    "dump_csv",
]


class NumericalError(RuntimeError):
    """An underlying numerical routine failed (e.g. SVD non-convergence)."""


class InvalidRankError(ValueError):
    """A requested or structural rank is inconsistent with the data."""


@dataclass(frozen=True)
class RankPolicy:
    """Decides which singular values count as nonzero.

    Either a structural rank ``r`` (known analytically) or a relative
    threshold ``tau_rel`` applied against the largest singular value.
    """

    r: int | None = None
    tau_rel: float | None = None

    @staticmethod
    def structural(r: int) -> "RankPolicy":
        if r < 0:
            raise InvalidRankError(f"structural rank must be >= 0, got {r}")
        return RankPolicy(r=r)

    @staticmethod
    def threshold(tau_rel: float | None = None) -> "RankPolicy":
        if tau_rel is not None and tau_rel <= 0:
            raise InvalidRankError(f"tau_rel must be > 0, got {tau_rel}")
        return RankPolicy(tau_rel=tau_rel)

    def accepted_rank(self, singular_values: np.ndarray, shape: tuple[int, int]) -> int:
        """Number of singular values accepted as nonzero."""
        s = np.asarray(singular_values, dtype=float)
        if self.r is not None:
            if self.r > min(shape):
                raise InvalidRankError(
                    f"structural rank {self.r} exceeds min{shape}"
                )
            return self.r
        if s.size == 0 or s[0] == 0.0:
            return 0
        tau = self.tau_rel
        if tau is None:
            tau = max(shape) * np.finfo(float).eps
        return int(np.count_nonzero(s > tau * s[0]))


@dataclass(frozen=True)
class SvdResult:
    """Full SVD ``a = left @ diag(singular_values) @ right.T``."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.singular_values.size
        return (self.left[:, :k] * self.singular_values) @ self.right[:, :k].T


def _check_finite(a: np.ndarray, name: str = "input") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"{name} contains non-finite entries")
    return a


def svd(a: np.ndarray) -> SvdResult:
    """Full SVD with singular values sorted descending."""
    a = _check_finite(a)
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return SvdResult(left=u, singular_values=s, right=vt.T)


def pseudoinverse(a: np.ndarray, policy: RankPolicy | None = None) -> np.ndarray:
    """Moore-Penrose inverse truncated per the rank policy."""
    policy = policy or RankPolicy.threshold()
    res = svd(a)
    r = policy.accepted_rank(res.singular_values, a.shape)
    if r == 0:
        return np.zeros((a.shape[1], a.shape[0]))
    u = res.left[:, :r]
    v = res.right[:, :r]
    return (v / res.singular_values[:r]) @ u.T


def numerical_rank(a: np.ndarray, policy: RankPolicy | None = None) -> int:
    policy = policy or RankPolicy.threshold()
    s = svd(a).singular_values
    return policy.accepted_rank(s, np.asarray(a).shape)


def smallest_nonzero_sv(a: np.ndarray, policy: RankPolicy | None = None) -> float:
    """Smallest singular value accepted as nonzero by the policy."""
    policy = policy or RankPolicy.threshold()
    s = svd(a).singular_values
    r = policy.accepted_rank(s, np.asarray(a).shape)
    if r == 0:
        raise InvalidRankError("all singular values rejected (rank zero)")
    return float(s[r - 1])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(_check_finite(a), _check_finite(b))


def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """Mode-``mode`` flattening (0-based mode index).

    Rows run along ``mode``; columns enumerate the remaining modes in
    increasing index, earliest mode varying slowest.
    """
    t = np.asarray(t, dtype=float)
    if not 0 <= mode < t.ndim:
        raise IndexError(f"mode {mode} out of range for order-{t.ndim} tensor")
    return np.moveaxis(t, mode, 0).reshape(t.shape[mode], -1)


def fold(m: np.ndarray, mode: int, dims: tuple[int, ...]) -> np.ndarray:
    """Inverse of :func:`unfold`; bit-exact round trip."""
    dims = tuple(dims)
    rest = dims[:mode] + dims[mode + 1:]
    t = np.asarray(m).reshape((dims[mode],) + rest)
    return np.moveaxis(t, 0, mode)


def multilinear_multiply(factors: list[np.ndarray], t: np.ndarray) -> np.ndarray:
    """Apply ``(U_1 kron ... kron U_D)`` to the tensor ``t``.

    Equivalent to ``unfold(result, j) = U_j @ unfold(t, j) @ kron(others).T``
    for every mode j.
    """
    t = np.asarray(t, dtype=float)
    if len(factors) != t.ndim:
        raise ValueError(f"expected {t.ndim} factors, got {len(factors)}")
    out = t
    for mode, u in enumerate(factors):
        u = np.asarray(u, dtype=float)
        if u.shape[1] != out.shape[mode]:
            raise ValueError(
                f"factor {mode} has {u.shape[1]} columns, tensor dim is {out.shape[mode]}"
            )
        out = fold(u @ unfold(out, mode), mode, out.shape[:mode] + (u.shape[0],) + out.shape[mode + 1:])
    return out


def multilinear_rank(t: np.ndarray, policy: RankPolicy | None = None) -> tuple[int, ...]:
    t = np.asarray(t, dtype=float)
    return tuple(numerical_rank(unfold(t, j), policy) for j in range(t.ndim))


def rng_gaussian_matrix(rows: int, cols: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal((rows, cols))


def rng_orthonormal(rows: int, cols: int, seed: int) -> np.ndarray:
    """Q-factor of a seeded Gaussian matrix; requires rows >= cols."""
    if rows < cols:
        raise ValueError(f"need rows >= cols, got {rows} < {cols}")
    g = rng_gaussian_matrix(rows, cols, seed)
    q, _ = np.linalg.qr(g)
    return q


def rng_unit_tensor(dims: tuple[int, ...], seed: int) -> np.ndarray:
    """Uniform draw from the unit Frobenius sphere (normalized Gaussian)."""
    g = np.random.default_rng(seed).standard_normal(tuple(dims))
    return g / np.linalg.norm(g)


def dump_csv(a: np.ndarray, path) -> None:
    """Debug dump: header line with the dims, then row-major entries."""
    a = np.asarray(a, dtype=float)
    with open(path, "w") as fh:
        fh.write("# dims," + ",".join(str(d) for d in a.shape) + "\n")
        flat = a.reshape(a.shape[0] if a.ndim else 1, -1)
        for row in np.atleast_2d(flat):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
