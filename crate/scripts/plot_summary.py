#!/usr/bin/env python3
"""Plot power and FDR curves from a campaign summary.csv.

Usage: plot_summary.py <summary.csv> [output-dir]

Produces power.png and fdr.png with one panel per (rho, n_batch) pair, one
series per method, pi1 on the x axis, and +/- 2 Monte Carlo standard error
ribbons.
"""

import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path):
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            values = line.strip().split(",")
            row = dict(zip(header, values))
            for key in ("rho", "pi1", "mean_power", "se_power", "mean_fdr", "se_fdr"):
                row[key] = float(row[key])
            row["n_batch"] = int(row["n_batch"])
            rows.append(row)
    return rows


def panel_plot(rows, stat, se, ylabel, out_path, alpha_line=None):
    panels = sorted({(r["rho"], r["n_batch"]) for r in rows})
    fig, axes = plt.subplots(1, len(panels), figsize=(4 * len(panels), 3.4), sharey=True)
    if len(panels) == 1:
        axes = [axes]
    for ax, (rho, n_batch) in zip(axes, panels):
        series = defaultdict(list)
        for r in rows:
            if (r["rho"], r["n_batch"]) == (rho, n_batch):
                series[r["method"]].append((r["pi1"], r[stat], r[se]))
        for method, points in sorted(series.items()):
            points.sort()
            x = [p[0] for p in points]
            y = [p[1] for p in points]
            lo = [p[1] - 2 * p[2] for p in points]
            hi = [p[1] + 2 * p[2] for p in points]
            ax.plot(x, y, marker="o", markersize=3, label=method)
            ax.fill_between(x, lo, hi, alpha=0.2)
        if alpha_line is not None:
            ax.axhline(alpha_line, linestyle="--", color="gray", linewidth=1)
        ax.set_xscale("log")
        ax.set_title(f"rho={rho}, n_batch={n_batch}")
        ax.set_xlabel("pi1")
    axes[0].set_ylabel(ylabel)
    axes[-1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    print(f"wrote {out_path}")


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    rows = load(sys.argv[1])
    out_dir = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    panel_plot(rows, "mean_power", "se_power", "power", out_dir / "power.png")
    panel_plot(rows, "mean_fdr", "se_fdr", "FDR", out_dir / "fdr.png", alpha_line=0.05)


if __name__ == "__main__":
    main()
