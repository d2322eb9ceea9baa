#!/usr/bin/env python3
"""Scan an (alpha, beta) grid and write the regime map as CSV.

Example:
    python scripts/phase_diagram.py --graph star:4 --amin -2 --amax 2 \
        --bmin -2 --bmax 2 --n 41 --out star4_phases.csv
"""
import argparse
import csv
import sys
from collections import Counter

import numpy as np

from bdgraph.classify import ExcludedCaseError, classify
from bdgraph.cli import parse_graph_spec
from bdgraph.model import ModelParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", default="star:4")
    ap.add_argument("--amin", type=float, default=-2.0)
    ap.add_argument("--amax", type=float, default=2.0)
    ap.add_argument("--bmin", type=float, default=-2.0)
    ap.add_argument("--bmax", type=float, default=2.0)
    ap.add_argument("--n", type=int, default=41, help="grid points per axis")
    ap.add_argument("--out", default="phase_diagram.csv")
    args = ap.parse_args()

    g = parse_graph_spec(args.graph)
    alphas = np.linspace(args.amin, args.amax, args.n)
    betas = np.linspace(args.bmin, args.bmax, args.n)
    tally: Counter = Counter()
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "regime", "fine_structure", "theorem"])
        for a in alphas:
            for b in betas:
                try:
                    r = classify(g, ModelParams(float(a), float(b)))
                    row = [repr(float(a)), repr(float(b)), r.regime, r.fine_structure or "", r.theorem]
                    tally[r.regime] += 1
                except ExcludedCaseError:
                    row = [repr(float(a)), repr(float(b)), "excluded", "", ""]
                    tally["excluded"] += 1
                writer.writerow(row)
    total = sum(tally.values())
    print(f"graph {args.graph}: {total} grid points -> {args.out}")
    for regime, count in tally.most_common():
        print(f"  {regime:<14} {count:>6}  ({100.0 * count / total:.1f}%)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
