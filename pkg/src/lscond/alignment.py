"""Least-squares distance between two orthogonal Tucker decompositions.

Minimizes
    ||S0 - (Q_1^T kron ... kron Q_D^T) S||_F^2 + sum_i ||U_i^0 - U_i Q_i||_F^2
over rotations Q_i in O(k_i) by Riemannian gradient descent with Armijo
backtracking and QR retraction. Small-k brute-force oracles are
provided for validation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import unfold
from .tucker import TuckerDecomposition, multilinear_multiply

__all__ = [
    "AlignmentProblem",
    "GdConfig",
    "AlignmentResult",
    "alignment_objective",
    "alignment_gradient",
    "ls_distance",
    "ls_distance_bruteforce_2d",
]


@dataclass(frozen=True)
class AlignmentProblem:
    reference: TuckerDecomposition
    candidate: TuckerDecomposition

    def __post_init__(self):
        if self.reference.dims != self.candidate.dims:
            raise ValueError(
                f"dims differ: {self.reference.dims} vs {self.candidate.dims}"
            )
        if self.reference.ranks != self.candidate.ranks:
            raise ValueError(
                f"ranks differ: {self.reference.ranks} vs {self.candidate.ranks}"
            )


@dataclass(frozen=True)
class GdConfig:
    grad_tol: float = 5e-8
    max_iters: int = 10000
    armijo_step: float = 1.0
    armijo_shrink: float = 0.5
    armijo_decrease: float = 1e-4
    n_restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be > 0")
        if not 0.0 < self.armijo_shrink < 1.0:
            raise ValueError("armijo_shrink must be in (0, 1)")


@dataclass(frozen=True)
class AlignmentResult:
    E_hat: float
    rotations: tuple[np.ndarray, ...]
    iterations: int
    converged: bool
    final_grad_norm: float


def _check_rotations(p: AlignmentProblem, rotations) -> list[np.ndarray]:
    qs = [np.asarray(q, dtype=float) for q in rotations]
    for i, (q, k) in enumerate(zip(qs, p.candidate.ranks)):
        if q.shape != (k, k):
            raise ValueError(f"rotation {i} has shape {q.shape}, expected {(k, k)}")
    return qs


def alignment_objective(p: AlignmentProblem, rotations) -> float:
    """Squared fiber-aligned distance at the given rotations."""
    qs = _check_rotations(p, rotations)
    core_gap = p.reference.core - multilinear_multiply([q.T for q in qs], p.candidate.core)
    val = float(np.sum(core_gap**2))
    for u0, u, q in zip(p.reference.factors, p.candidate.factors, qs):
        val += float(np.sum((u0 - u @ q) ** 2))
    return val


def alignment_gradient(p: AlignmentProblem, rotations) -> list[np.ndarray]:
    """Riemannian gradient on the product of O(k_i): per mode, the
    projection Q_i skew(Q_i^T dF/dQ_i) of the Euclidean partial."""
    qs = _check_rotations(p, rotations)
    core_rot = multilinear_multiply([q.T for q in qs], p.candidate.core)
    gap = p.reference.core - core_rot
    grads = []
    for i, q in enumerate(qs):
        # partial core with every mode except i rotated
        fs = [qq.T for qq in qs]
        fs[i] = np.eye(q.shape[0])
        partial = multilinear_multiply(fs, p.candidate.core)
        egrad = -2.0 * unfold(partial, i) @ unfold(gap, i).T
        u0, u = p.reference.factors[i], p.candidate.factors[i]
        egrad += -2.0 * u.T @ (u0 - u @ q)
        w = q.T @ egrad
        grads.append(q @ (w - w.T) / 2.0)
    return grads


def _grad_norm(grads) -> float:
    return math.sqrt(sum(float(np.sum(g**2)) for g in grads))


def _qr_retract(q: np.ndarray) -> np.ndarray:
    """Q-factor with positive R diagonal."""
    qf, r = np.linalg.qr(q)
    return qf * np.sign(np.sign(np.diag(r)) + 0.5)


def _descend(p: AlignmentProblem, start: list[np.ndarray], cfg: GdConfig):
    qs = [q.copy() for q in start]
    f = alignment_objective(p, qs)
    iters = 0
    gnorm = math.inf
    while iters < cfg.max_iters:
        grads = alignment_gradient(p, qs)
        gnorm = _grad_norm(grads)
        if gnorm <= cfg.grad_tol:
            return qs, f, iters, True, gnorm
        step = cfg.armijo_step
        sq_norm = gnorm * gnorm
        while True:
            trial = [_qr_retract(q - step * g) for q, g in zip(qs, grads)]
            f_trial = alignment_objective(p, trial)
            if f_trial <= f - cfg.armijo_decrease * step * sq_norm:
                break
            step *= cfg.armijo_shrink
            if step < 1e-18:
                # no admissible step: numerically stationary
                return qs, f, iters, gnorm <= cfg.grad_tol, gnorm
        qs, f = trial, f_trial
        iters += 1
    return qs, f, iters, False, gnorm


def _procrustes_start(p: AlignmentProblem) -> list[np.ndarray]:
    """Per-factor orthogonal Procrustes alignment: the polar factor of
    U_i^T U_i^0."""
    qs = []
    for u0, u in zip(p.reference.factors, p.candidate.factors):
        w, _, vt = np.linalg.svd(u.T @ u0)
        qs.append(w @ vt)
    return qs


def _random_orthogonal(k: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.sign(np.diag(r)) + 0.5)


def ls_distance(p: AlignmentProblem, cfg: GdConfig | None = None) -> AlignmentResult:
    """Best fiber-aligned distance found by multi-start gradient descent.

    Starts from the Procrustes initialization, the identity, and random
    orthogonal draws (cfg.n_restarts starts in total). Modes with
    k_i = 1 are discrete ({+1, -1}) and enumerated exhaustively.
    """
    cfg = cfg or GdConfig()
    rng = np.random.default_rng(cfg.seed)
    ranks = p.candidate.ranks
    discrete = [i for i, k in enumerate(ranks) if k == 1]
    continuous = [i for i in range(len(ranks)) if ranks[i] > 1]

    starts = [_procrustes_start(p)]
    if cfg.n_restarts >= 2:
        starts.append([np.eye(k) for k in ranks])
    for _ in range(max(0, cfg.n_restarts - len(starts))):
        starts.append([_random_orthogonal(k, rng) for k in ranks])

    best = None
    sign_patterns = list(itertools.product([1.0, -1.0], repeat=len(discrete)))
    for signs in sign_patterns:
        for start in starts:
            qs0 = [q.copy() for q in start]
            for i, s in zip(discrete, signs):
                qs0[i] = np.array([[s]])
            if continuous:
                qs, f, iters, ok, gnorm = _descend(p, qs0, cfg)
            else:
                qs, iters = qs0, 0
                f = alignment_objective(p, qs)
                ok, gnorm = True, 0.0
            if best is None or f < best[1]:
                best = (qs, f, iters, ok, gnorm)
            if not continuous:
                break  # starts are irrelevant for a purely discrete search
    qs, f, iters, ok, gnorm = best
    return AlignmentResult(
        E_hat=math.sqrt(max(f, 0.0)),
        rotations=tuple(qs),
        iterations=iters,
        converged=ok,
        final_grad_norm=gnorm,
    )


def _o2(theta: float, reflect: bool) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    if reflect:
        return np.array([[c, s], [s, -c]])
    return np.array([[c, -s], [s, c]])


def _linear_coefficients(p: AlignmentProblem, qs: list[np.ndarray], i: int) -> np.ndarray:
    """Matrix A with objective(Q_i) = const - 2 <Q_i, A>, others fixed."""
    fs = [q.T for q in qs]
    fs[i] = np.eye(qs[i].shape[0])
    partial = multilinear_multiply(fs, p.candidate.core)
    a = unfold(partial, i) @ unfold(p.reference.core, i).T
    u0, u = p.reference.factors[i], p.candidate.factors[i]
    return a + u.T @ u0


def _scan_o2_mode(p: AlignmentProblem, qs, i: int, n_angles: int) -> np.ndarray:
    """Best O(2) (or O(1)) rotation for mode i with the others fixed,
    via an angle grid plus closed-form refinement of the winning cell."""
    k = qs[i].shape[0]
    a = _linear_coefficients(p, qs, i)
    if k == 1:
        return np.array([[1.0 if a[0, 0] >= 0 else -1.0]])
    angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    best_q = None
    best_val = -math.inf
    for reflect in (False, True):
        if reflect:
            ca, sa = a[0, 0] - a[1, 1], a[0, 1] + a[1, 0]
        else:
            ca, sa = a[0, 0] + a[1, 1], a[1, 0] - a[0, 1]
        vals = ca * np.cos(angles) + sa * np.sin(angles)
        j = int(np.argmax(vals))
        # refine: the grid objective is a pure sinusoid with peak atan2(sa, ca)
        theta = math.atan2(sa, ca)
        val = math.hypot(ca, sa)
        if val < vals[j]:  # guard roundoff
            theta, val = angles[j], vals[j]
        if val > best_val:
            best_val = val
            best_q = _o2(theta, reflect)
    return best_q


def ls_distance_bruteforce_2d(p: AlignmentProblem, n_angles: int = 720) -> float:
    """Independent oracle for k_i <= 2: per-mode angle/reflection grid
    with coordinate descent across modes, multi-start over reflection
    patterns and grid initial angles."""
    ranks = p.candidate.ranks
    if any(k > 2 for k in ranks):
        raise ValueError(f"oracle supports k_i <= 2 only, got ranks {ranks}")
    d = len(ranks)
    best = math.inf
    init_angles = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
    for reflects in itertools.product((False, True), repeat=d):
        for theta0 in init_angles:
            qs = []
            for i, k in enumerate(ranks):
                if k == 1:
                    qs.append(np.array([[-1.0 if reflects[i] else 1.0]]))
                else:
                    qs.append(_o2(theta0, reflects[i]))
            f = alignment_objective(p, qs)
            for _ in range(200):
                for i in range(d):
                    qs[i] = _scan_o2_mode(p, qs, i, n_angles)
                f_new = alignment_objective(p, qs)
                if f - f_new < 1e-15:
                    f = f_new
                    break
                f = f_new
            best = min(best, f)
    return math.sqrt(max(best, 0.0))
