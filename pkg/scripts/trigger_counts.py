#!/usr/bin/env python3
"""Count DAGs, connected DAGs and triggers for each variable count, writing one catalog per count."""

import argparse
import time
from pathlib import Path

from trigger_lab.trigger_search import find_triggers, format_catalog


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--vars", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--out", default="catalogs", help="directory for the .trg files")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print("vars dags connected triggers seconds")
    for n in args.vars:
        t0 = time.perf_counter()
        cat = find_triggers(n)
        (out / f"triggers_{n}.trg").write_text(format_catalog(cat))
        print(n, *cat.table_row(), f"{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
