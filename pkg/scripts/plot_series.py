#!/usr/bin/env python3
"""Render a trajectory CSV produced by `qrcd run` as two PNG figures.

Figure one plots the squared coefficients residual against the iteration
count (log scale); figure two plots the probe prediction (de-normalized
column when present). Usage:

    python scripts/plot_series.py trajectory.csv [--out-prefix figs/exp1]

Requires matplotlib (install the package with the [plots] extra).
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def read_series(path):
    iters, residuals, predictions = [], [], []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            iters.append(int(row["iter"]))
            residuals.append(float(row["residual_sq"]))
            cell = row["prediction_denorm"] or row["prediction"]
            predictions.append(float(cell) if cell else None)
    return iters, residuals, predictions


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("trajectory", help="CSV written by `qrcd run`")
    parser.add_argument("--out-prefix", default=None,
                        help="output path prefix (default: alongside the CSV)")
    args = parser.parse_args()

    path = Path(args.trajectory)
    prefix = Path(args.out_prefix) if args.out_prefix else path.with_suffix("")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    iters, residuals, predictions = read_series(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(iters, residuals, lw=0.8)
    ax.set_xlabel("iteration")
    ax.set_ylabel("coefficients residual (squared)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(f"{prefix}_residual.png", dpi=150)

    if any(p is not None for p in predictions):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(iters, predictions, lw=0.8)
        ax.set_xlabel("iteration")
        ax.set_ylabel("predicted value for the probe input")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(f"{prefix}_prediction.png", dpi=150)

    print(f"wrote {prefix}_residual.png")


if __name__ == "__main__":
    main()
