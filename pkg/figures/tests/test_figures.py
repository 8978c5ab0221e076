import csv
import json

import numpy as np
import pytest

from lscond_figures import (
    PlotSpec,
    cell_eligible,
    group_cells,
    log_ratio_density,
    read_rows,
    render_ratio_densities,
)
from lscond_figures.cli import main as cli_main

FIELDS = [
    "dataset_id", "alpha", "epsilon", "sample_index", "seed", "kappa",
    "dist_x", "e_hat", "ratio", "converged", "iterations", "restarts_used",
]


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def make_row(**kw):
    base = dict(
        dataset_id="d0", alpha=1.0, epsilon=1e-4, sample_index=0, seed=1,
        kappa=10.0, dist_x=1e-4, e_hat=5e-4, ratio=0.5, converged="true",
        iterations=5, restarts_used=1,
    )
    base.update(kw)
    return base


def test_single_value_csv_gives_spike(tmp_path):
    path = tmp_path / "records.csv"
    write_csv(path, [make_row(sample_index=i) for i in range(20)])
    rows = read_rows(path)
    ratios = np.array([r.ratio for r in rows])
    grid = np.linspace(-2, 2, 401)
    density = log_ratio_density(ratios, grid)
    peak = grid[np.argmax(density)]
    assert peak == pytest.approx(np.log10(0.5), abs=0.02)
    # the mass is concentrated in one narrow spike
    assert np.sum(density > density.max() / 2) <= 5


def test_eligibility_filter_drops_floor_violations(tmp_path):
    # one cell has >10% of samples under the e_hat floor
    good = [make_row(sample_index=i) for i in range(10)]
    bad = [
        make_row(sample_index=i, epsilon=1e-12,
                 e_hat=(1e-9 if i < 3 else 1e-3), ratio=0.3)
        for i in range(10)
    ]
    path = tmp_path / "records.csv"
    write_csv(path, good + bad)
    cells = group_cells(read_rows(path))
    assert cell_eligible(cells[("d0", 1.0, 1e-4)])
    assert not cell_eligible(cells[("d0", 1.0, 1e-12)])

    out = tmp_path / "fig.png"
    written = render_ratio_densities(PlotSpec(csv_path=path, out_path=out))
    assert written == [out]
    assert out.exists()


def test_empty_eligible_set_writes_text_report(tmp_path):
    rows = [make_row(sample_index=i, e_hat=1e-12) for i in range(5)]
    path = tmp_path / "records.csv"
    write_csv(path, rows)
    out = tmp_path / "fig.png"
    written = render_ratio_densities(PlotSpec(csv_path=path, out_path=out))
    assert written[0].suffix == ".txt"
    assert "no eligible cells" in written[0].read_text()


def test_summary_flags_take_precedence(tmp_path):
    rows = [make_row(sample_index=i) for i in range(5)] + [
        make_row(sample_index=i, epsilon=1e-6, ratio=0.2) for i in range(5)
    ]
    path = tmp_path / "records.csv"
    write_csv(path, rows)
    summary = {
        "cells": [
            {"alpha": 1.0, "epsilon": 1e-4, "eligible": True},
            {"alpha": 1.0, "epsilon": 1e-6, "eligible": False},
        ]
    }
    spath = tmp_path / "summary.json"
    spath.write_text(json.dumps(summary))
    out = tmp_path / "fig.png"
    spec = PlotSpec(csv_path=path, out_path=out, summary_path=spath)
    assert render_ratio_densities(spec) == [out]


def test_filter_agrees_with_summary_flags(tmp_path):
    # local filter and the harness summary agree on every cell
    pytest.importorskip("lscond")
    from lscond import ExperimentConfig, GdConfig
    from lscond.experiment import run_experiment, summarize, write_records_csv

    cfg = ExperimentConfig(
        k=3, dims=(5, 5, 5), alphas=(1.0,), epsilons=(1e-6, 1e-13),
        samples_per_cell=15, base_seed=4, gd=GdConfig(n_restarts=1),
    )
    records = run_experiment(cfg)
    summary = summarize(records)
    path = tmp_path / "records.csv"
    write_records_csv(records, path)
    cells = group_cells(read_rows(path))
    for cell in summary["cells"]:
        key = ("default", cell["alpha"], cell["epsilon"])
        assert cell_eligible(cells[key]) == cell["eligible"]


def test_cli_roundtrip(tmp_path, capsys):
    path = tmp_path / "records.csv"
    write_csv(path, [make_row(sample_index=i, ratio=0.3 + 0.01 * i) for i in range(30)])
    out = tmp_path / "fig.png"
    assert cli_main(["--csv", str(path), "--out", str(out)]) == 0
    assert out.exists()


def test_cli_missing_file_errors(tmp_path, capsys):
    assert cli_main(["--csv", str(tmp_path / "nope.csv"), "--out", "x.png"]) == 2
    assert "error" in capsys.readouterr().err
