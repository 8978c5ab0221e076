"""Density plots of the error-ratio distribution from experiment CSVs.

Consumes the records CSV and summary JSON written by the experiment
harness; no other coupling to it. Cells are included only when at least
90% of their converged samples clear the measurement-noise floor on the
fitted error and at least 90% keep the first-order bound below one.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

E_HAT_FLOOR = 5e-8
BOUND_CEILING = 1.0
ELIGIBILITY_FRACTION = 0.9


@dataclass(frozen=True)
class Row:
    dataset_id: str
    alpha: float
    epsilon: float
    kappa: float
    dist_x: float
    e_hat: float
    ratio: float
    converged: bool


@dataclass(frozen=True)
class PlotSpec:
    csv_path: Path
    out_path: Path
    summary_path: Path | None = None
    cells: list[tuple[float, float]] | None = None  # None = all eligible
    bandwidth: str = "scott"


def read_rows(path) -> list[Row]:
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            rows.append(
                Row(
                    dataset_id=raw["dataset_id"],
                    alpha=float(raw["alpha"]),
                    epsilon=float(raw["epsilon"]),
                    kappa=float(raw["kappa"]),
                    dist_x=float(raw["dist_x"]),
                    e_hat=float(raw["e_hat"]),
                    ratio=float(raw["ratio"]),
                    converged=raw["converged"] == "true",
                )
            )
    if not rows:
        raise ValueError(f"no records in {path}")
    return rows


def group_cells(rows: list[Row]) -> dict[tuple[str, float, float], list[Row]]:
    cells: dict[tuple[str, float, float], list[Row]] = {}
    for row in rows:
        cells.setdefault((row.dataset_id, row.alpha, row.epsilon), []).append(row)
    return cells


def cell_eligible(rows: list[Row]) -> bool:
    """Same rule the experiment harness applies when summarizing."""
    conv = [r for r in rows if r.converged] or rows
    frac_e_hat = np.mean([r.e_hat >= E_HAT_FLOOR for r in conv])
    frac_bound = np.mean([r.kappa * r.dist_x <= BOUND_CEILING for r in conv])
    return bool(
        frac_e_hat >= ELIGIBILITY_FRACTION and frac_bound >= ELIGIBILITY_FRACTION
    )


def log_ratio_density(ratios: np.ndarray, grid: np.ndarray, bandwidth: str = "scott"):
    """Gaussian KDE of log10(ratio) on the given log10 grid.

    Degenerate samples (all equal) produce a narrow spike at the value.
    """
    logs = np.log10(ratios[ratios > 0])
    if logs.size == 0:
        return np.zeros_like(grid)
    if np.ptp(logs) < 1e-12:
        width = 1e-3
        return np.exp(-0.5 * ((grid - logs[0]) / width) ** 2) / (
            width * np.sqrt(2 * np.pi)
        )
    from scipy.stats import gaussian_kde

    return gaussian_kde(logs, bw_method=bandwidth)(grid)


def render_ratio_densities(spec: PlotSpec) -> list[Path]:
    """One panel per dataset, one density curve per eligible cell.

    Returns the written file paths. An empty eligible set produces a
    text report instead of an image.
    """
    rows = read_rows(spec.csv_path)
    cells = group_cells(rows)

    if spec.summary_path is not None:
        with open(spec.summary_path) as fh:
            summary = json.load(fh)
        eligible_pairs = {
            (c["alpha"], c["epsilon"]) for c in summary["cells"] if c["eligible"]
        }
        selected = {key: rs for key, rs in cells.items() if key[1:] in eligible_pairs}
    else:
        selected = {key: rs for key, rs in cells.items() if cell_eligible(rs)}
    if spec.cells is not None:
        wanted = set(spec.cells)
        selected = {k: v for k, v in selected.items() if k[1:] in wanted}
    skipped = sorted(set(cells) - set(selected))

    if not selected:
        out = spec.out_path.with_suffix(".txt")
        lines = ["no eligible cells to plot"] + [
            f"skipped dataset={d} alpha={a:g} epsilon={e:g}" for d, a, e in skipped
        ]
        out.write_text("\n".join(lines) + "\n")
        return [out]

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    datasets = sorted({key[0] for key in selected})
    fig, axes = plt.subplots(
        len(datasets), 1, figsize=(8, 3.2 * len(datasets)), squeeze=False
    )
    all_logs = np.concatenate(
        [np.log10([r.ratio for r in rs if r.ratio > 0]) for rs in selected.values()]
    )
    grid = np.linspace(all_logs.min() - 1.0, all_logs.max() + 1.0, 512)

    for ax, dataset in zip(axes.ravel(), datasets):
        for (d, alpha, epsilon), rs in sorted(selected.items()):
            if d != dataset:
                continue
            ratios = np.array([r.ratio for r in rs if r.converged] or [r.ratio for r in rs])
            density = log_ratio_density(ratios, grid, spec.bandwidth)
            ax.plot(10.0**grid, density, label=f"a={alpha:g}, e={epsilon:g}")
        ax.set_xscale("log")
        ax.set_xlabel("measured error / first-order bound")
        ax.set_ylabel("density of log10 ratio")
        ax.set_title(f"dataset {dataset}")
        note = ", ".join(f"a={a:g},e={e:g}" for d, a, e in skipped if d == dataset)
        legend_title = f"omitted: {note}" if note else None
        ax.legend(fontsize=8, title=legend_title, title_fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return [spec.out_path]
