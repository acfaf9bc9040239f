"""``trigger-lab`` command line."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bayesnet import Dataset
from .evaluation import edit_breakdown, format_metric, optimize_alpha
from .graph import enumerate_dags, format_dags, is_weakly_connected
from .pipeline import (
    LEVELS,
    ExperimentManifest,
    all_structures,
    count_cells,
    generate_nets,
    load_case,
    run_pipeline,
    select_structures,
    simulate_data,
)
from .structure_learn import format_hybrid, parse_hybrid, pc, trigger_pc
from .trigger_search import find_triggers, format_catalog, parse_catalog

log = logging.getLogger("trigger_lab")


def _csv_ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(","))


def _csv_strs(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


def cmd_triggers_search(args: argparse.Namespace) -> int:
    if not 3 <= args.vars <= 5:
        print(f"error: --vars must be between 3 and 5, got {args.vars}", file=sys.stderr)
        return 2
    cat = find_triggers(args.vars, comparison=args.comparison, dedupe=args.dedupe)
    out = Path(args.out)
    dags = enumerate_dags(args.vars)
    try:
        out.write_text(format_catalog(cat))
        out.with_suffix(".dags").write_text(format_dags(dags))
        out.with_suffix(".connected").write_text(format_dags(g for g in dags if is_weakly_connected(g)))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(*cat.table_row())
    return 0


def _manifest_from_args(args: argparse.Namespace) -> ExperimentManifest:
    m = ExperimentManifest.parse(Path(args.manifest).read_text()) if getattr(args, "manifest", None) \
        else ExperimentManifest()
    overrides = {}
    for key in ("vars", "seed", "jobs", "generations", "population", "max_structures"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if getattr(args, "arity", None) is not None:
        overrides["arities"] = (args.arity,)
    if getattr(args, "families", None):
        overrides["families"] = _csv_strs(args.families)
    if getattr(args, "sizes", None):
        overrides["sample_sizes"] = _csv_ints(args.sizes)
    if getattr(args, "levels", None):
        overrides["strength_levels"] = _csv_strs(args.levels)
    m = ExperimentManifest(**{**m.__dict__, **overrides})
    m.validate()
    return m


def _structures(m: ExperimentManifest, full: bool):
    out = []
    catalog = find_triggers(m.vars) if "trigger" in m.families else None
    for fam in m.families:
        out += select_structures(all_structures(fam, m.vars, catalog), m.max_structures, m.seed, full)
    return out


def cmd_nets_generate(args: argparse.Namespace) -> int:
    m = _manifest_from_args(args)
    structures = _structures(m, args.full)
    generate_nets(m, structures, Path(args.out))
    print(f"{len(structures) * len(m.arities) * len(m.strength_levels)} nets written")
    return 0


def cmd_data_simulate(args: argparse.Namespace) -> int:
    m = _manifest_from_args(args)
    structures = _structures(m, args.full)
    paths = simulate_data(m, structures, Path(args.nets), Path(args.out))
    print(f"{len(paths)} datasets written")
    return 0


def cmd_alpha_optimize(args: argparse.Namespace) -> int:
    cases = [load_case(p) for p in sorted(Path(args.data).glob("*.csv"))]
    if args.arity is not None:
        cases = [c for c in cases if c.data.arity == args.arity]
    if not args.include_latent:
        cases = [c for c in cases if not c.is_latent]
    if not cases:
        print("error: no datasets matched", file=sys.stderr)
        return 1
    catalog = parse_catalog(Path(args.catalog).read_text()) if args.catalog else None
    res = optimize_alpha(cases, args.learner, args.samples, args.seed, catalog)
    print(f"best_alpha={res.best_alpha:.5f} min={res.min_distance:.5f} "
          f"max={res.max_distance:.5f} mean={res.mean_distance:.5f}")
    if args.out:
        lines = ["alpha,mean_edit_distance"] + [f"{a:.6f},{d:.6f}" for a, d in sorted(res.samples)]
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def cmd_eval_run(args: argparse.Namespace) -> int:
    data = Dataset.from_csv(args.data)
    if args.learner == "pc":
        graph = pc(data, args.alpha)
        print(format_hybrid(graph), end="")
        return 0
    if not args.catalog:
        print("error: trigger_pc needs --catalog", file=sys.stderr)
        return 2
    res = trigger_pc(data, args.alpha, parse_catalog(Path(args.catalog).read_text()))
    if res.is_trigger:
        print(f"# matched trigger {res.matched_trigger_id}")
    print(format_hybrid(res.graph), end="")
    return 0


def cmd_eval_score_file(args: argparse.Namespace) -> int:
    try:
        truth = parse_hybrid(Path(args.truth).read_text())
        learned = parse_hybrid(Path(args.learned).read_text(), names=truth.names)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if learned.n_nodes != truth.n_nodes:
        print(f"error: node count mismatch ({truth.n_nodes} vs {learned.n_nodes})", file=sys.stderr)
        return 1
    vocab = args.vocab or ("fci" if any("circle" in (m[0].value, m[1].value)
                                        for m in learned.links.values()) else "pc")
    try:
        parts = edit_breakdown(truth, learned, vocab)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(sum(d for _, d in parts))
    for (a, b), d in parts:
        print(f"  {truth.name(a)} {truth.name(b)} {d}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    m = _manifest_from_args(args)
    if args.out:
        m.out = args.out
    if args.count_only:
        catalog = find_triggers(m.vars) if "trigger" in m.families else None
        for fam in m.families:
            print(f"{m.vars} {fam} {count_cells(m, fam, catalog, full=args.full)}")
        return 0
    try:
        totals = run_pipeline(m, full=args.full, progress=lambda s: print(f"[pipeline] {s}", flush=True))
    except Exception as exc:  # report which stage broke, keep the traceback in the log
        log.exception("pipeline failed")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for (learner, mode), cm in totals.items():
        metrics = " ".join(f"{k}={format_metric(v, 4)}" for k, v in cm.metrics().items())
        print(f"{learner} ({mode}): tp={cm.tp} fn={cm.fn} tn={cm.tn} fp={cm.fp} {metrics}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trigger-lab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="group", required=True)

    trig = sub.add_parser("triggers").add_subparsers(dest="cmd", required=True)
    s = trig.add_parser("search", help="enumerate DAGs and latent models, write the trigger catalog")
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--out", default="catalog.trg")
    s.add_argument("--comparison", choices=("all", "connected"), default="all")
    s.add_argument("--dedupe", choices=("structure", "latent"), default="structure")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_triggers_search)

    def add_manifest_flags(q: argparse.ArgumentParser) -> None:
        q.add_argument("--manifest")
        q.add_argument("--vars", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--jobs", type=int)
        q.add_argument("--families", help="comma list of dag,trigger")
        q.add_argument("--max-structures", dest="max_structures", type=int)
        q.add_argument("--full", action="store_true", help="use every structure")

    nets = sub.add_parser("nets").add_subparsers(dest="cmd", required=True)
    s = nets.add_parser("generate", help="evolve strong/weak/medium CPTs per structure")
    add_manifest_flags(s)
    s.add_argument("--arity", type=int, choices=(2, 3))
    s.add_argument("--levels", default=",".join(LEVELS))
    s.add_argument("--generations", type=int)
    s.add_argument("--population", type=int)
    s.add_argument("--out", default="nets/")
    s.set_defaults(func=cmd_nets_generate)

    data = sub.add_parser("data").add_subparsers(dest="cmd", required=True)
    s = data.add_parser("simulate", help="forward-sample datasets from generated nets")
    add_manifest_flags(s)
    s.add_argument("--arity", type=int, choices=(2, 3))
    s.add_argument("--sizes", help="comma list of sample sizes")
    s.add_argument("--nets", default="nets/", help="directory written by 'nets generate'")
    s.add_argument("--levels", default=",".join(LEVELS))
    s.add_argument("--out", default="data/")
    s.set_defaults(func=cmd_data_simulate)

    alpha = sub.add_parser("alpha").add_subparsers(dest="cmd", required=True)
    s = alpha.add_parser("optimize", help="random search for the alpha minimizing edit distance")
    s.add_argument("--data", required=True, help="directory of dataset CSVs")
    s.add_argument("--learner", choices=("pc", "trigger_pc"), default="pc")
    s.add_argument("--catalog")
    s.add_argument("--arity", type=int, choices=(2, 3))
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--include-latent", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_alpha_optimize)

    ev = sub.add_parser("eval").add_subparsers(dest="cmd", required=True)
    s = ev.add_parser("run", help="learn one dataset and print the hybrid graph")
    s.add_argument("--data", required=True)
    s.add_argument("--learner", choices=("pc", "trigger_pc"), default="pc")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--catalog")
    s.set_defaults(func=cmd_eval_run)
    s = ev.add_parser("score-file", help="edit distance between a learned and a true graph file")
    s.add_argument("learned")
    s.add_argument("truth")
    s.add_argument("--vocab", choices=("pc", "fci"))
    s.set_defaults(func=cmd_eval_score_file)

    s = sub.add_parser("pipeline", help="run every stage from a manifest")
    add_manifest_flags(s)
    s.add_argument("--out")
    s.add_argument("--count-only", action="store_true", help="print dataset counts and stop")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
