#!/usr/bin/env python3
"""Print the mean edit distance against alpha from a pipeline run, as a binned text curve."""

import argparse
import csv
from pathlib import Path

import numpy as np


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("run", nargs="?", default="runs/desk", help="pipeline output directory")
    ap.add_argument("--bins", type=int, default=10)
    args = ap.parse_args()
    with (Path(args.run) / "alpha_samples.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    for arity in sorted({r["arity"] for r in rows}):
        pts = np.array([(float(r["alpha"]), float(r["mean_edit_distance"])) for r in rows if r["arity"] == arity])
        best = pts[np.lexsort((pts[:, 0], pts[:, 1]))[0]]
        print(f"arity {arity}: {len(pts)} samples, best alpha {best[0]:.4f} at distance {best[1]:.3f}")
        edges = np.linspace(0, 0.5, args.bins + 1)
        lo, hi = pts[:, 1].min(), pts[:, 1].max()
        for a, b in zip(edges, edges[1:]):
            sel = pts[(pts[:, 0] > a) & (pts[:, 0] <= b), 1]
            if sel.size == 0:
                print(f"  ({a:.2f}, {b:.2f}]   no samples")
                continue
            bar = "#" * (1 + int(30 * (sel.mean() - lo) / (hi - lo or 1)))
            print(f"  ({a:.2f}, {b:.2f}]  {sel.mean():7.3f} {bar}")


if __name__ == "__main__":
    main()
