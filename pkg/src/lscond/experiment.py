"""Monte-Carlo validation of the first-order error estimate for Tucker
decompositions.

Pipeline per sample: generate a random reference decomposition with a
controllable condition number, perturb its tensor, project back with
ST-HOSVD, compute the condition number and the fiber-aligned distance,
and record the ratio of the measured error to its first-order bound.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .alignment import AlignmentProblem, GdConfig, ls_distance
from .linalg import InvalidRankError, multilinear_rank, rng_unit_tensor, unfold, fold
from .tucker import TuckerDecomposition, cond_tucker, st_hosvd, tucker_reconstruct

__all__ = [
    "ModelParams",
    "ExperimentConfig",
    "SampleRecord",
    "generate_decomposition",
    "perturb_and_project",
    "run_cell",
    "run_experiment",
    "summarize",
    "write_records_csv",
    "read_records_csv",
]

DEFAULT_ALPHAS = (1e-8, 1e-4, 1.0)
# exponents -14 to -2 in steps of 1.5 decades
DEFAULT_EPSILONS = tuple(10.0 ** e for e in np.arange(-14.0, -2.0 + 1e-9, 1.5))

E_HAT_FLOOR = 5e-8
BOUND_CEILING = 1.0
ELIGIBILITY_FRACTION = 0.9


@dataclass(frozen=True)
class ModelParams:
    k: int
    dims: tuple[int, ...]
    alpha: float

    def __post_init__(self):
        if self.k > min(self.dims):
            raise ValueError(f"k={self.k} exceeds min dims {self.dims}")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        object.__setattr__(self, "dims", tuple(self.dims))


@dataclass(frozen=True)
class ExperimentConfig:
    k: int = 3
    dims: tuple[int, ...] = (5, 5, 5)
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    samples_per_cell: int = 2000
    base_seed: int = 0
    gd: GdConfig = field(default_factory=GdConfig)
    dataset_id: str = "default"

    def __post_init__(self):
        if not self.alphas or not self.epsilons:
            raise ValueError("alpha and epsilon grids must be non-empty")
        if self.samples_per_cell < 1:
            raise ValueError("samples_per_cell must be >= 1")
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "alphas", tuple(self.alphas))
        object.__setattr__(self, "epsilons", tuple(self.epsilons))

    @staticmethod
    def from_json(path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        gd = GdConfig(**raw.pop("gd", {}))
        return ExperimentConfig(gd=gd, **raw)


@dataclass(frozen=True)
class SampleRecord:
    dataset_id: str
    alpha: float
    epsilon: float
    sample_index: int
    seed: int
    kappa: float
    dist_x: float
    e_hat: float
    ratio: float
    converged: bool
    iterations: int
    restarts_used: int


CSV_FIELDS = [
    "dataset_id", "alpha", "epsilon", "sample_index", "seed", "kappa",
    "dist_x", "e_hat", "ratio", "converged", "iterations", "restarts_used",
]


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed from the base seed and cell coordinates."""
    tag = ":".join([str(base_seed)] + [repr(p) for p in parts])
    digest = hashlib.sha256(tag.encode()).digest()
    return int.from_bytes(digest[:8], "little")


def generate_decomposition(params: ModelParams, seed: int) -> TuckerDecomposition:
    """Random reference decomposition with condition number ~ 10/alpha.

    Core: S'_(1) = (A B^T + alpha I) H_(1) with Gaussian A, B, H, then
    normalized to unit Frobenius norm. Factors: Q-factors of Gaussian
    matrices. Degenerate draws are retried with an incremented sub-seed.
    """
    k, dims, alpha = params.k, params.dims, params.alpha
    d = len(dims)
    for attempt in range(100):
        rng = np.random.default_rng(derive_seed(seed, "model", attempt))
        a = rng.standard_normal((k, k - 1)) if k > 1 else np.zeros((k, 0))
        b = rng.standard_normal((k, k - 1)) if k > 1 else np.zeros((k, 0))
        h = rng.standard_normal((k,) * d)
        s1 = (a @ b.T + alpha * np.eye(k)) @ unfold(h, 0)
        core = fold(s1, 0, (k,) * d)
        nrm = np.linalg.norm(core)
        if nrm == 0.0:
            continue
        core /= nrm
        if multilinear_rank(core) != (k,) * d:
            continue
        factors = []
        for n in dims:
            q, _ = np.linalg.qr(rng.standard_normal((n, k)))
            factors.append(q)
        return TuckerDecomposition(factors=tuple(factors), core=core)
    raise InvalidRankError("could not draw a full-multilinear-rank core")


def perturb_and_project(
    d0: TuckerDecomposition, epsilon: float, seed: int
) -> tuple[np.ndarray, TuckerDecomposition]:
    """Feasible perturbation: add epsilon times a uniform unit tensor,
    then project with ST-HOSVD at the reference ranks."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    x0 = tucker_reconstruct(d0)
    for attempt in range(100):
        delta = rng_unit_tensor(d0.dims, derive_seed(seed, "perturb", attempt))
        x_prime = x0 + epsilon * delta
        try:
            d = st_hosvd(x_prime, d0.ranks)
        except InvalidRankError:
            continue
        return tucker_reconstruct(d), d
    raise InvalidRankError("ST-HOSVD kept producing rank-deficient cores")


def run_cell(
    cfg: ExperimentConfig, alpha: float, epsilon: float
) -> list[SampleRecord]:
    """All samples of one (alpha, epsilon) grid cell."""
    params = ModelParams(k=cfg.k, dims=cfg.dims, alpha=alpha)
    records = []
    for idx in range(cfg.samples_per_cell):
        seed = derive_seed(cfg.base_seed, alpha, epsilon, idx)
        d0 = generate_decomposition(params, seed)
        x0 = tucker_reconstruct(d0)
        x, d = perturb_and_project(d0, epsilon, seed)
        # reference has unit norm, so absolute and relative metrics agree
        kappa = cond_tucker(d0, "relative").kappa_rel
        dist_x = float(np.linalg.norm(x - x0))
        gd = GdConfig(
            grad_tol=cfg.gd.grad_tol,
            max_iters=cfg.gd.max_iters,
            armijo_step=cfg.gd.armijo_step,
            armijo_shrink=cfg.gd.armijo_shrink,
            armijo_decrease=cfg.gd.armijo_decrease,
            n_restarts=cfg.gd.n_restarts,
            seed=derive_seed(seed, "gd"),
        )
        result = ls_distance(AlignmentProblem(reference=d0, candidate=d), gd)
        bound = kappa * dist_x
        ratio = result.E_hat / bound if bound > 0 else math.inf
        records.append(
            SampleRecord(
                dataset_id=cfg.dataset_id,
                alpha=alpha,
                epsilon=epsilon,
                sample_index=idx,
                seed=seed,
                kappa=kappa,
                dist_x=dist_x,
                e_hat=result.E_hat,
                ratio=ratio,
                converged=result.converged,
                iterations=result.iterations,
                restarts_used=gd.n_restarts,
            )
        )
    return records


def run_experiment(cfg: ExperimentConfig) -> list[SampleRecord]:
    records = []
    for alpha in cfg.alphas:
        for epsilon in cfg.epsilons:
            records.extend(run_cell(cfg, alpha, epsilon))
    return records


def summarize(records: list[SampleRecord]) -> dict:
    """Per-cell ratio quantiles, eligibility flags, and global kappa*alpha
    statistics. Quantiles and fractions use converged samples only."""
    if not records:
        raise ValueError("no records to summarize")
    cells: dict[tuple[float, float], list[SampleRecord]] = {}
    for rec in records:
        cells.setdefault((rec.alpha, rec.epsilon), []).append(rec)

    cell_reports = []
    for (alpha, epsilon), recs in sorted(cells.items()):
        conv = [r for r in recs if r.converged]
        use = conv if conv else recs
        ratios = np.array([r.ratio for r in use])
        frac_e_hat = float(np.mean([r.e_hat >= E_HAT_FLOOR for r in use]))
        frac_bound = float(np.mean([r.kappa * r.dist_x <= BOUND_CEILING for r in use]))
        q = {
            f"q{int(100 * level):02d}": float(np.quantile(ratios, level))
            for level in (0.05, 0.25, 0.50, 0.75, 0.95)
        }
        cell_reports.append(
            {
                "alpha": alpha,
                "epsilon": epsilon,
                "n_samples": len(recs),
                "n_converged": len(conv),
                "ratio_quantiles": q,
                "frac_e_hat_above_floor": frac_e_hat,
                "frac_bound_below_one": frac_bound,
                "eligible": frac_e_hat >= ELIGIBILITY_FRACTION
                and frac_bound >= ELIGIBILITY_FRACTION,
            }
        )

    ka = np.array([r.kappa * r.alpha for r in records])
    return {
        "cells": cell_reports,
        "kappa_alpha_geometric_mean": float(np.exp(np.mean(np.log(ka)))),
        "kappa_alpha_in_1_100_fraction": float(np.mean((ka >= 1.0) & (ka <= 100.0))),
    }


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records: list[SampleRecord], path) -> None:
    ordered = sorted(records, key=lambda r: (r.alpha, r.epsilon, r.sample_index))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in ordered:
            row = asdict(rec)
            writer.writerow([_fmt(row[f]) for f in CSV_FIELDS])


def read_records_csv(path) -> list[SampleRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                SampleRecord(
                    dataset_id=row["dataset_id"],
                    alpha=float(row["alpha"]),
                    epsilon=float(row["epsilon"]),
                    sample_index=int(row["sample_index"]),
                    seed=int(row["seed"]),
                    kappa=float(row["kappa"]),
                    dist_x=float(row["dist_x"]),
                    e_hat=float(row["e_hat"]),
                    ratio=float(row["ratio"]),
                    converged=row["converged"] == "true",
                    iterations=int(row["iterations"]),
                    restarts_used=int(row["restarts_used"]),
                )
            )
    return records
