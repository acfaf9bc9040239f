#!/usr/bin/env python3
"""Run the subsampled end-to-end pipeline and print the latent-detection confusion matrices."""

import argparse
from pathlib import Path

from trigger_lab.evaluation import format_metric
from trigger_lab.pipeline import ExperimentManifest, run_pipeline


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--manifest", help="key=value manifest; defaults to the built-in desk settings")
    ap.add_argument("--out", default="runs/desk")
    ap.add_argument("--full", action="store_true", help="use every structure instead of a subsample")
    args = ap.parse_args()
    m = ExperimentManifest.parse(Path(args.manifest).read_text()) if args.manifest else ExperimentManifest()
    m.out = args.out
    totals = run_pipeline(m, full=args.full, progress=lambda s: print(f"[pipeline] {s}", flush=True))
    print((Path(m.out) / "alpha.csv").read_text(), end="")
    for (learner, mode), cm in sorted(totals.items()):
        metrics = " ".join(f"{k}={format_metric(v, 4)}" for k, v in cm.metrics().items())
        print(f"{learner:<10} {mode:<9} tp={cm.tp} fn={cm.fn} tn={cm.tn} fp={cm.fp} {metrics}")


if __name__ == "__main__":
    main()
