"""figures --csv records.csv [--summary summary.json] --out fig3.png"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plotting import PlotSpec, render_ratio_densities


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures", description="render ratio density plots from experiment CSVs"
    )
    parser.add_argument("--csv", required=True, help="records CSV path")
    parser.add_argument("--summary", help="summary JSON with eligibility flags")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    spec = PlotSpec(
        csv_path=Path(args.csv),
        out_path=Path(args.out),
        summary_path=Path(args.summary) if args.summary else None,
    )
    try:
        written = render_ratio_densities(spec)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
