#!/usr/bin/env python3
"""Fit and (optionally) plot regret curves emitted by `bilat simulate`.

Reads one or more curve CSVs (header: T,mean_regret,std_regret,mean_budget),
prints a log-log OLS slope per file, and writes a PNG when matplotlib is
available and --out is given.

Usage:
    tools/plot_curve.py out/curve.csv [more.csv ...] [--min-T 256] [--out plot.png]
"""

import argparse
import csv
import math
import sys


def read_curve(path):
    rows = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            rows.append(
                (
                    int(row["T"]),
                    float(row["mean_regret"]),
                    float(row["std_regret"]),
                )
            )
    return rows


def loglog_slope(rows, min_t):
    pts = [(math.log(t), math.log(r)) for t, r, _ in rows if t >= min_t and r > 0]
    if len(pts) < 2:
        return None
    n = len(pts)
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    sxy = sum((x - mx) * (y - my) for x, y in pts)
    slope = sxy / sxx
    rss = sum((y - my - slope * (x - mx)) ** 2 for x, y in pts)
    stderr = math.sqrt(rss / (n - 2) / sxx) if n > 2 else 0.0
    return slope, stderr, n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csvs", nargs="+", help="curve CSV files")
    ap.add_argument("--min-T", type=int, default=256, dest="min_t")
    ap.add_argument("--out", help="write a log-log PNG (needs matplotlib)")
    args = ap.parse_args()

    curves = {path: read_curve(path) for path in args.csvs}
    for path, rows in curves.items():
        fit = loglog_slope(rows, args.min_t)
        if fit is None:
            print(f"{path}: fewer than 2 usable points (min T {args.min_t})")
        else:
            slope, stderr, n = fit
            print(f"{path}: slope {slope:.4f} +/- {stderr:.4f} ({n} points)")

    if args.out:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            sys.exit("matplotlib not installed; omit --out or install it")
        fig, ax = plt.subplots()
        for path, rows in curves.items():
            ts = [t for t, _, _ in rows]
            rs = [r for _, r, _ in rows]
            es = [e for _, _, e in rows]
            ax.errorbar(ts, rs, yerr=es, marker="o", label=path)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("T")
        ax.set_ylabel("mean regret")
        ax.legend()
        fig.savefig(args.out, dpi=150, bbox_inches="tight")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
