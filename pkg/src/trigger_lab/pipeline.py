"""End-to-end experiment harness: structures -> nets -> datasets -> alpha search -> evaluation.

Randomness derives from the manifest seed. The seed for a unit of work is
``SeedSequence([seed, stage, *coordinates]).generate_state(1)[0]`` with stage
codes 1 (structure subsample), 2 (GA nets), 3 (sampling), 4 (alpha search);
coordinates are the structure index, arity, level index and sample size as
applicable.
"""

from __future__ import annotations

import csv
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .bayesnet import BayesNet, Dataset, default_names, format_net, forward_sample, parse_net
from .evaluation import (
    Case,
    ConfusionMatrix,
    format_metric,
    graph_edit_distance,
    latent_verdict,
    learn,
    optimize_alpha,
)
from .graph import Dag, enumerate_dags, is_weakly_connected
from .netgen_ga import GaConfig, three_level_suite
from .trigger_search import LatentModel, TriggerCatalog, find_triggers, format_catalog, parse_catalog

log = logging.getLogger(__name__)

LEVELS = ("strong", "weak", "medium")
STAGE_SUBSAMPLE, STAGE_NETS, STAGE_DATA, STAGE_ALPHA = 1, 2, 3, 4


def derive_seed(root: int, stage: int, *coords: int) -> int:
    return int(np.random.SeedSequence([root, stage, *coords]).generate_state(1)[0])


@dataclass
class ExperimentManifest:
    vars: int = 4
    families: tuple[str, ...] = ("trigger", "dag")
    arities: tuple[int, ...] = (2, 3)
    strength_levels: tuple[str, ...] = LEVELS
    sample_sizes: tuple[int, ...] = (100, 1000, 10000)
    seed: int = 0
    max_structures: int = 6  # per family; 0 keeps every structure
    population: int = 40
    generations: int = 30
    alpha_samples: int = 50
    default_alpha: float = 0.05
    learners: tuple[str, ...] = ("pc", "trigger_pc")
    out: str = "runs/desk"
    jobs: int = 1

    @classmethod
    def parse(cls, text: str) -> "ExperimentManifest":
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or key not in kinds:
                raise ValueError(f"manifest line {lineno}: unknown or malformed entry {raw!r}")
            kind = kinds[key]
            if kind.startswith("tuple[int"):
                values[key] = tuple(int(v) for v in val.split(","))
            elif kind.startswith("tuple[str"):
                values[key] = tuple(v.strip() for v in val.split(","))
            elif kind == "int":
                values[key] = int(val)
            elif kind == "float":
                values[key] = float(val)
            else:
                values[key] = val
        m = cls(**values)
        m.validate()
        return m

    def validate(self) -> None:
        if not 3 <= self.vars <= 5:
            raise ValueError("vars must be 3, 4 or 5")
        for fam in self.families:
            if fam not in ("trigger", "dag"):
                raise ValueError(f"unknown structure family {fam!r}")
        for lvl in self.strength_levels:
            if lvl not in LEVELS:
                raise ValueError(f"unknown strength level {lvl!r}")
        for a in self.arities:
            if a not in (2, 3):
                raise ValueError("arities must be 2 or 3")
        for lr in self.learners:
            if lr not in ("pc", "trigger_pc"):
                raise ValueError(f"unknown learner {lr!r}")

    def dump(self) -> str:
        lines = []
        for k, v in asdict(self).items():
            if k == "jobs":
                continue
            lines.append(f"{k}={','.join(map(str, v)) if isinstance(v, tuple) else v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.dump().encode()).hexdigest()[:16]


# --- structures ------------------------------------------------------------

@dataclass
class Structure:
    family: str
    index: int
    graph: Dag  # full graph; for triggers the hidden node is the last one
    model: LatentModel | None = None

    @property
    def sid(self) -> str:
        return f"{self.family}{self.index:03d}"

    @property
    def hidden(self) -> list[int]:
        return [] if self.model is None else [self.model.hidden]

    @property
    def truth(self) -> Dag | LatentModel:
        return self.model if self.model is not None else self.graph


def all_structures(family: str, n: int, catalog: TriggerCatalog | None = None) -> list[Structure]:
    if family == "dag":
        graphs = [g for g in enumerate_dags(n) if is_weakly_connected(g)]
        return [Structure("dag", i, g) for i, g in enumerate(graphs)]
    if catalog is None:
        catalog = find_triggers(n)
    return [Structure("trigger", i, t.model.full, t.model) for i, t in enumerate(catalog.triggers)]


def select_structures(structures: list[Structure], limit: int, seed: int, full: bool) -> list[Structure]:
    if full or limit <= 0 or len(structures) <= limit:
        return structures
    fam_code = 0 if structures[0].family == "dag" else 1
    rng = np.random.default_rng(derive_seed(seed, STAGE_SUBSAMPLE, fam_code))
    keep = np.sort(rng.choice(len(structures), size=limit, replace=False))
    return [structures[i] for i in keep]


def count_cells(manifest: ExperimentManifest, family: str, catalog: TriggerCatalog | None = None,
                full: bool = True) -> int:
    """Number of datasets the manifest implies for one structure family."""
    structures = select_structures(all_structures(family, manifest.vars, catalog),
                                   manifest.max_structures, manifest.seed, full)
    return (len(structures) * len(manifest.arities) * len(manifest.strength_levels)
            * len(manifest.sample_sizes))


# --- stages ----------------------------------------------------------------

def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _net_job(args) -> tuple[str, dict]:
    s, arity, seed, cfg = args
    suite = three_level_suite(s.graph, arity, seed, cfg)
    return s.sid, {lvl: (r.net, r.strength) for lvl, r in suite.as_dict().items()}


def net_path(net_dir: Path, s: Structure, arity: int, level: str) -> Path:
    return net_dir / f"{s.sid}_a{arity}_{level}.net"


def write_net(path: Path, s: Structure, net: BayesNet, level: str, strength: float, seed: int) -> None:
    hidden = ",".join(map(str, s.hidden))
    head = f"meta family={s.family} structure={s.sid} level={level} hidden={hidden or '-'} seed={seed}\n"
    path.write_text(head + format_net(net, strength))


def read_net(path: Path) -> tuple[BayesNet, dict]:
    text = path.read_text()
    head, _, body = text.partition("\n")
    meta = dict(tok.split("=") for tok in head.split()[1:])
    return parse_net(body), meta


def generate_nets(manifest: ExperimentManifest, structures: list[Structure], net_dir: Path) -> None:
    net_dir.mkdir(parents=True, exist_ok=True)
    cfg = GaConfig(population=manifest.population, generations=manifest.generations)
    jobs = []
    for s in structures:
        fam_code = 0 if s.family == "dag" else 1
        for arity in manifest.arities:
            seed = derive_seed(manifest.seed, STAGE_NETS, fam_code, s.index, arity)
            jobs.append((s, arity, seed, cfg))
    results = _map(_net_job, jobs, manifest.jobs)
    for (s, arity, seed, _), (_, nets) in zip(jobs, results):
        for level in manifest.strength_levels:
            net, strength = nets[level]
            write_net(net_path(net_dir, s, arity, level), s, net, level, strength, seed)


def simulate_data(manifest: ExperimentManifest, structures: list[Structure], net_dir: Path,
                  data_dir: Path) -> list[Path]:
    data_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    names = default_names(manifest.vars)
    for s in structures:
        fam_code = 0 if s.family == "dag" else 1
        for arity in manifest.arities:
            for li, level in enumerate(manifest.strength_levels):
                net, _ = read_net(net_path(net_dir, s, arity, level))
                for size in manifest.sample_sizes:
                    seed = derive_seed(manifest.seed, STAGE_DATA, fam_code, s.index, arity, li, size)
                    data = forward_sample(net, size, seed, hidden=s.hidden, names=names)
                    data.provenance = {
                        "dataset_id": f"{s.sid}_a{arity}_{level}_n{size}",
                        "family": s.family,
                        "structure": s.sid,
                        "structure_edges": sorted(map(list, s.graph.edges)),
                        "hidden": s.hidden,
                        "strength_level": level,
                        "seed": seed,
                    }
                    path = data_dir / f"{s.sid}_a{arity}_{level}_n{size}.csv"
                    data.to_csv(path)
                    paths.append(path)
    return paths


def load_case(path: Path) -> Case:
    data = Dataset.from_csv(path)
    p = data.provenance
    edges = [tuple(e) for e in p["structure_edges"]]
    hidden = p["hidden"]
    if hidden:
        h = hidden[0]
        children = tuple(sorted(b for a, b in edges if a == h))
        base = Dag(h, frozenset(e for e in edges if h not in e))
        truth: Dag | LatentModel = LatentModel(base, children)
    else:
        truth = Dag(data.n_vars, frozenset(edges))
    return Case(data, truth, p["dataset_id"])


def run_alpha_search(manifest: ExperimentManifest, cases: list[Case], root: Path,
                     catalog: TriggerCatalog) -> dict[tuple[str, int], float]:
    """Best alpha per (learner, arity), fit on fully observed structures.

    Trigger-PC reuses the alpha found for PC.
    """
    best: dict[tuple[str, int], float] = {}
    rows, samples = [], []
    for arity in manifest.arities:
        pool = [c for c in cases if c.data.arity == arity and not c.is_latent] or \
               [c for c in cases if c.data.arity == arity]
        if not pool:
            continue
        res = optimize_alpha(pool, "pc", manifest.alpha_samples,
                             derive_seed(manifest.seed, STAGE_ALPHA, arity), catalog)
        for learner in manifest.learners:
            best[(learner, arity)] = res.best_alpha
        rows.append(["pc", arity, len(pool), f"{res.best_alpha:.5f}", f"{res.min_distance:.5f}",
                     f"{res.max_distance:.5f}", f"{res.mean_distance:.5f}"])
        samples.extend(["pc", arity, f"{a:.6f}", f"{d:.6f}"] for a, d in sorted(res.samples))
    with (root / "alpha.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["learner", "arity", "n_datasets", "best_alpha", "min_distance", "max_distance",
                    "mean_distance"])
        w.writerows(rows)
    with (root / "alpha_samples.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["learner", "arity", "alpha", "mean_edit_distance"])
        w.writerows(samples)
    return best


def condition_of(case: Case) -> tuple[str, int, str, int]:
    p = case.data.provenance
    return (p["family"], case.data.arity, p["strength_level"], case.data.n_rows)


def evaluate(manifest: ExperimentManifest, cases: list[Case], alphas: dict[tuple[str, int], float],
             root: Path, catalog: TriggerCatalog) -> dict[tuple[str, str], ConfusionMatrix]:
    rows = []
    tables: dict[tuple[str, str], dict[tuple, ConfusionMatrix]] = {}
    for mode in ("optimized", "default"):
        for learner in manifest.learners:
            per_cond = tables.setdefault((learner, mode), {})
            for case in cases:
                alpha = alphas[(learner, case.data.arity)] if mode == "optimized" else manifest.default_alpha
                res = learn(case, learner, alpha, catalog)
                dist = graph_edit_distance(case.truth_graph(), res.graph)
                verdict = latent_verdict(res, case.truth)
                cm = per_cond.setdefault(condition_of(case), ConfusionMatrix())
                setattr(cm, verdict.lower(), getattr(cm, verdict.lower()) + 1)
                rows.append([learner, mode, f"{alpha:.5f}", case.dataset_id, dist, verdict])
    with (root / "report.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["learner", "alpha_mode", "alpha", "dataset_id", "edit_distance", "latent_verdict"])
        w.writerows(rows)
    totals = {}
    out = []
    for (learner, mode), per_cond in tables.items():
        total = ConfusionMatrix()
        out.append(f"== {learner} ({mode} alpha)")
        out.append("family,arity,strength,n_rows,tp,fn,tn,fp")
        for cond in sorted(per_cond):
            cm = per_cond[cond]
            total = total + cm
            out.append(",".join(map(str, cond)) + f",{cm.tp},{cm.fn},{cm.tn},{cm.fp}")
        out.append(f"cumulative: tp={total.tp} fn={total.fn} tn={total.tn} fp={total.fp}")
        out.append("  " + " ".join(f"{k}={format_metric(v, 4)}" for k, v in total.metrics().items()))
        out.append("")
        totals[(learner, mode)] = total
    (root / "confusion.txt").write_text("\n".join(out))
    return totals


# --- driver ----------------------------------------------------------------

def _stage_done(root: Path, stage: str, digest: str) -> bool:
    marker = root / f".{stage}.done"
    return marker.exists() and marker.read_text().strip() == digest


def _mark_done(root: Path, stage: str, digest: str) -> None:
    (root / f".{stage}.done").write_text(digest + "\n")


def run_pipeline(manifest: ExperimentManifest, full: bool = False, progress: Callable[[str], None] = log.info
                 ) -> dict[tuple[str, str], ConfusionMatrix]:
    root = Path(manifest.out)
    root.mkdir(parents=True, exist_ok=True)
    digest = manifest.digest() + ("-full" if full else "")
    (root / "manifest.txt").write_text(manifest.dump())

    cat_path = root / "catalog.trg"
    if _stage_done(root, "triggers", digest):
        catalog = parse_catalog(cat_path.read_text())
    else:
        progress(f"searching triggers over {manifest.vars} variables")
        catalog = find_triggers(manifest.vars)
        cat_path.write_text(format_catalog(catalog))
        _mark_done(root, "triggers", digest)

    structures: list[Structure] = []
    for fam in manifest.families:
        structures += select_structures(all_structures(fam, manifest.vars, catalog),
                                        manifest.max_structures, manifest.seed, full)

    if not _stage_done(root, "nets", digest):
        progress(f"evolving nets for {len(structures)} structures")
        generate_nets(manifest, structures, root / "nets")
        _mark_done(root, "nets", digest)

    if not _stage_done(root, "data", digest):
        progress("sampling datasets")
        simulate_data(manifest, structures, root / "nets", root / "data")
        _mark_done(root, "data", digest)
    paths = sorted((root / "data").glob("*.csv"))
    wanted = {f"{s.sid}_a{a}_{lvl}_n{n}.csv" for s in structures for a in manifest.arities
              for lvl in manifest.strength_levels for n in manifest.sample_sizes}
    cases = [load_case(p) for p in paths if p.name in wanted]
    progress(f"{len(cases)} datasets")

    if _stage_done(root, "alpha", digest):
        alphas = {}
        with (root / "alpha.csv").open() as fh:
            for row in csv.DictReader(fh):
                for learner in manifest.learners:
                    alphas[(learner, int(row["arity"]))] = float(row["best_alpha"])
    else:
        progress("optimizing alpha")
        alphas = run_alpha_search(manifest, cases, root, catalog)
        _mark_done(root, "alpha", digest)

    progress("evaluating learners")
    totals = evaluate(manifest, cases, alphas, root, catalog)
    _mark_done(root, "eval", digest)
    return totals
