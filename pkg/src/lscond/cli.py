"""Command-line interface.

Subcommands:
  two-factor   condition report for an (L, R) pair read from JSON
  tucker-cond  condition report for a Tucker decomposition read from JSON
  align        one fiber-alignment distance between two decompositions
  experiment   run the Monte-Carlo grid from a config file
  verify       run the closed-form-vs-oracle cross-check suites
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .alignment import AlignmentProblem, GdConfig, ls_distance
from .experiment import (
    ExperimentConfig,
    run_experiment,
    summarize,
    write_records_csv,
)
from .tucker import TuckerDecomposition, cond_tucker, cond_tucker_oracle
from .two_factor import TwoFactorPair, cond_two_factor, cond_two_factor_oracle
from .linalg import rng_gaussian_matrix, rng_orthonormal, rng_unit_tensor


def _load_decomposition(raw: dict) -> TuckerDecomposition:
    return TuckerDecomposition(
        factors=tuple(np.asarray(u, dtype=float) for u in raw["factors"]),
        core=np.asarray(raw["core"], dtype=float),
    )


def _cmd_two_factor(args) -> int:
    with open(args.input) as fh:
        raw = json.load(fh)
    pair = TwoFactorPair(L=np.asarray(raw["L"], float), R=np.asarray(raw["R"], float))
    print(json.dumps(asdict(cond_two_factor(pair)), indent=2))
    return 0


def _cmd_tucker_cond(args) -> int:
    with open(args.input) as fh:
        raw = json.load(fh)
    report = cond_tucker(_load_decomposition(raw), "relative")
    out = asdict(report)
    out["per_mode_sigma"] = list(report.per_mode_sigma)
    print(json.dumps(out, indent=2))
    return 0


def _cmd_align(args) -> int:
    with open(args.input) as fh:
        raw = json.load(fh)
    problem = AlignmentProblem(
        reference=_load_decomposition(raw["reference"]),
        candidate=_load_decomposition(raw["candidate"]),
    )
    result = ls_distance(problem, GdConfig())
    print(
        json.dumps(
            {
                "E_hat": result.E_hat,
                "iterations": result.iterations,
                "converged": result.converged,
                "final_grad_norm": result.final_grad_norm,
            },
            indent=2,
        )
    )
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_experiment(cfg)
    write_records_csv(records, out / "records.csv")
    with open(out / "summary.json", "w") as fh:
        json.dump(summarize(records), fh, indent=2)
    print(f"wrote {len(records)} records to {out / 'records.csv'}")
    return 0


def _random_two_factor(m: int, n: int, k: int, seed: int) -> TwoFactorPair:
    return TwoFactorPair(
        L=rng_gaussian_matrix(m, k, seed), R=rng_gaussian_matrix(k, n, seed + 1)
    )


def _random_tucker(dims, ranks, seed: int) -> TuckerDecomposition:
    factors = tuple(
        rng_orthonormal(n, k, seed + 7 * i) for i, (n, k) in enumerate(zip(dims, ranks))
    )
    return TuckerDecomposition(factors=factors, core=rng_unit_tensor(ranks, seed + 1000))


def _cmd_verify(args) -> int:
    worst = 0.0
    if args.suite == "two-factor":
        shapes = [(4, 3, 2), (5, 5, 5), (6, 4, 4), (3, 3, 1)]
        for i in range(args.n):
            m, n, k = shapes[i % len(shapes)]
            pair = _random_two_factor(m, n, k, 10_000 + 2 * i)
            closed = cond_two_factor(pair).kappa
            oracle = cond_two_factor_oracle(pair)
            worst = max(worst, abs(closed - oracle) / oracle)
    elif args.suite == "tucker":
        for i in range(args.n):
            d = _random_tucker((5, 4, 6), (3, 2, 3), 20_000 + 13 * i)
            for metric in ("absolute", "relative"):
                closed = getattr(cond_tucker(d, metric), f"kappa_{metric[:3]}")
                oracle = cond_tucker_oracle(d, metric)
                worst = max(worst, abs(closed - oracle) / oracle)
    else:
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    ok = worst <= args.tol
    print(f"suite={args.suite} n={args.n} worst_rel_err={worst:.3e} "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lscond", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("two-factor", help="condition report for an (L, R) pair")
    p.add_argument("--input", required=True, help="JSON file with fields L, R")
    p.set_defaults(func=_cmd_two_factor)

    p = sub.add_parser("tucker-cond", help="condition report for a decomposition")
    p.add_argument("--input", required=True, help="JSON file with factors, core")
    p.set_defaults(func=_cmd_tucker_cond)

    p = sub.add_parser("align", help="fiber-alignment distance")
    p.add_argument("--input", required=True, help="JSON file with reference, candidate")
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("experiment", help="run the Monte-Carlo grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="closed-form vs oracle cross-checks")
    p.add_argument("--suite", required=True, choices=["two-factor", "tucker"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
