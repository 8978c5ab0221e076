"""Generic least-squares condition number engine.

Works purely on Jacobian blocks expressed in orthonormal coordinates of
the tangent spaces; manifold bookkeeping is the caller's job.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .linalg import (
    InvalidRankError,
    NumericalError,
    RankPolicy,
    pseudoinverse,
    svd,
)

__all__ = [
    "JacobianBlocks",
    "ConditionReport",
    "DegenerateSystemError",
    "kappa_ls",
    "kappa_inverse_problem",
    "finite_difference_jacobian",
    "subproblem_kappas",
]


class DegenerateSystemError(ValueError):
    """The solution-side Jacobian has rank zero under its policy."""


@dataclass(frozen=True)
class JacobianBlocks:
    """Partial derivatives dF/dx and dF/dy in orthonormal coordinates."""

    dFdx: np.ndarray
    dFdy: np.ndarray
    rank_policy: RankPolicy

    def __post_init__(self):
        dFdx = np.atleast_2d(np.asarray(self.dFdx, dtype=float))
        dFdy = np.atleast_2d(np.asarray(self.dFdy, dtype=float))
        if dFdx.shape[0] != dFdy.shape[0]:
            raise ValueError(
                f"row mismatch: dFdx has {dFdx.shape[0]} rows, dFdy has {dFdy.shape[0]}"
            )
        object.__setattr__(self, "dFdx", dFdx)
        object.__setattr__(self, "dFdy", dFdy)


@dataclass(frozen=True)
class ConditionReport:
    kappa: float
    r_used: int
    sigma_r: float
    policy_echo: RankPolicy


def kappa_ls(blocks: JacobianBlocks) -> ConditionReport:
    """Spectral norm of pinv(dFdy) @ dFdx with policy-truncated pinv."""
    res = svd(blocks.dFdy)
    r = blocks.rank_policy.accepted_rank(res.singular_values, blocks.dFdy.shape)
    if r == 0:
        raise DegenerateSystemError("dFdy has rank zero under its policy")
    composed = pseudoinverse(blocks.dFdy, blocks.rank_policy) @ blocks.dFdx
    kappa = float(np.linalg.svd(composed, compute_uv=False)[0]) if composed.size else 0.0
    return ConditionReport(
        kappa=kappa,
        r_used=r,
        sigma_r=float(res.singular_values[r - 1]),
        policy_echo=blocks.rank_policy,
    )


def kappa_inverse_problem(dG: np.ndarray, policy: RankPolicy) -> ConditionReport:
    """Condition of an inverse problem G(y) = x with constant-rank DG.

    Specialization of :func:`kappa_ls` with dFdx = -I; equals the
    reciprocal of the smallest nonzero singular value of DG.
    """
    dG = np.atleast_2d(np.asarray(dG, dtype=float))
    blocks = JacobianBlocks(dFdx=-np.eye(dG.shape[0]), dFdy=dG, rank_policy=policy)
    return kappa_ls(blocks)


def finite_difference_jacobian(
    fn: Callable[[np.ndarray], np.ndarray],
    point: np.ndarray,
    step: float = 1e-5,
) -> np.ndarray:
    """Central-difference Jacobian of a vector function at a point."""
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    point = np.asarray(point, dtype=float)
    cols = []
    for i in range(point.size):
        e = np.zeros_like(point)
        e[i] = step
        fp = np.asarray(fn(point + e), dtype=float)
        fm = np.asarray(fn(point - e), dtype=float)
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise NumericalError(f"function returned non-finite values at column {i}")
        cols.append((fp - fm) / (2.0 * step))
    return np.column_stack(cols)


def subproblem_kappas(
    blocks: JacobianBlocks,
    row_subsets: Sequence[Sequence[int]],
    policies: Sequence[RankPolicy] | None = None,
) -> list[ConditionReport]:
    """Condition numbers of row-restricted subsystems, in input order.

    Each subset must keep the constant-rank assumption; the caller
    certifies this by supplying a per-subset rank policy (defaults to
    the full system's policy).
    """
    if policies is None:
        policies = [blocks.rank_policy] * len(row_subsets)
    if len(policies) != len(row_subsets):
        raise ValueError("one policy per row subset required")
    reports = []
    for rows, policy in zip(row_subsets, policies):
        idx = np.asarray(list(rows), dtype=int)
        sub = JacobianBlocks(
            dFdx=blocks.dFdx[idx, :], dFdy=blocks.dFdy[idx, :], rank_policy=policy
        )
        reports.append(kappa_ls(sub))
    return reports
