#!/usr/bin/env python3
"""Generic plotter for the CSV tables emitted by the selectsets CLI.

Usage: plot_csv.py FILE [--x COLUMN] [--y COLUMN] [--series COLUMN] [--out PNG]

Defaults fit the simulate schema (x=n, y=mean, series=stat). Requires
matplotlib; the CLI itself never does.
"""
import argparse
import csv
import sys
from collections import defaultdict


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("file")
    ap.add_argument("--x", default="n")
    ap.add_argument("--y", default="mean")
    ap.add_argument("--series", default="stat")
    ap.add_argument("--logx", action="store_true")
    ap.add_argument("--out", default="")
    args = ap.parse_args()

    series = defaultdict(list)
    with open(args.file, newline="") as fh:
        for row in csv.DictReader(fh):
            if not row.get(args.x):  # blank separator between blocks
                continue
            key = row.get(args.series, "") if args.series in row else ""
            series[key].append((float(row[args.x]), float(row[args.y])))

    if not series:
        print("no rows parsed", file=sys.stderr)
        return 1

    import matplotlib

    if args.out:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for key, pts in sorted(series.items()):
        pts.sort()
        plt.plot([x for x, _ in pts], [y for _, y in pts], marker="o", label=key or args.y)
    if args.logx:
        plt.xscale("log")
    plt.xlabel(args.x)
    plt.ylabel(args.y)
    plt.legend()
    plt.grid(True, alpha=0.3)
    if args.out:
        plt.savefig(args.out, dpi=120, bbox_inches="tight")
        print(args.out)
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
