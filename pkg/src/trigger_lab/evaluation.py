"""Edit distance between hybrid graphs, alpha search, and latent-detection confusion matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bayesnet import Dataset, make_rng
from .citest import PValueCache
from .graph import Dag
from .structure_learn import (
    A,
    C,
    T,
    HybridGraph,
    LearnResult,
    Mark,
    dag_to_hybrid,
    latent_projection,
    pc,
    trigger_pc,
)
from .trigger_search import LatentModel, TriggerCatalog

# Link kinds as (mark at A, mark at B); None means no link.
LinkKind = tuple[Mark, Mark] | None

KIND_NAMES: dict[str, LinkKind] = {
    "A--B": (T, T),
    "A->B": (T, A),
    "A<-B": (A, T),
    "A<>B": (A, A),
    "Ao-B": (C, T),
    "A-oB": (T, C),
    "Ao>B": (C, A),
    "A<oB": (A, C),
    "AooB": (C, C),
    "null": None,
}

PC_KINDS = ("A--B", "A->B", "A<-B", "A<>B", "null")
FCI_KINDS = ("A--B", "A->B", "A<-B", "Ao-B", "A-oB", "Ao>B", "A<oB", "A<>B", "AooB", "null")
TRUE_KINDS = ("A->B", "A<>B", "null")

# Distances transcribed row by row, learned kinds in the order of PC_KINDS / FCI_KINDS.
PC_TABLE = {
    "A->B": (2, 0, 4, 2, 6),
    "A<>B": (4, 2, 2, 0, 6),
    "null": (6, 6, 6, 6, 0),
}
FCI_TABLE = {
    "A->B": (2, 0, 4, 3, 1, 1, 3, 2, 2, 6),
    "A<>B": (4, 2, 2, 3, 3, 1, 1, 0, 2, 6),
    "null": (6, 6, 6, 6, 6, 6, 6, 6, 6, 0),
}


def _table(vocab: str) -> dict[tuple[LinkKind, LinkKind], int]:
    kinds, rows = (PC_KINDS, PC_TABLE) if vocab == "pc" else (FCI_KINDS, FCI_TABLE)
    return {(KIND_NAMES[t], KIND_NAMES[k]): d
            for t, row in rows.items() for k, d in zip(kinds, row)}


EDIT_TABLES = {"pc": _table("pc"), "fci": _table("fci")}


def pairwise_edit_distance(true_kind: LinkKind, learned_kind: LinkKind, vocab: str = "pc") -> int:
    if vocab not in EDIT_TABLES:
        raise ValueError(f"unknown vocabulary {vocab!r}")
    try:
        return EDIT_TABLES[vocab][(true_kind, learned_kind)]
    except KeyError:
        raise ValueError(f"no {vocab} distance for true {true_kind} vs learned {learned_kind}") from None


def endpoint_distance(true_kind: LinkKind, learned_kind: LinkKind) -> int:
    """Per-endpoint decomposition: tail/arrow swap costs 2, a circle costs 1, presence mismatch 6."""
    if true_kind is None or learned_kind is None:
        return 0 if true_kind == learned_kind else 6
    cost = 0
    for t, l in zip(true_kind, learned_kind):
        if t == l:
            continue
        cost += 1 if C in (t, l) else 2
    return cost


def graph_edit_distance(truth: HybridGraph, learned: HybridGraph, vocab: str = "pc") -> int:
    return sum(d for _, d in edit_breakdown(truth, learned, vocab))


def edit_breakdown(truth: HybridGraph, learned: HybridGraph, vocab: str = "pc") -> list[tuple[tuple[int, int], int]]:
    if truth.n_nodes != learned.n_nodes:
        raise ValueError(f"node count mismatch: {truth.n_nodes} vs {learned.n_nodes}")
    out = []
    for a in range(truth.n_nodes):
        for b in range(a + 1, truth.n_nodes):
            t, l = truth.marks(a, b), learned.marks(a, b)
            if t == (A, T):
                # read the pair from the other end so the true arc is A -> B
                t, l = (T, A), None if l is None else (l[1], l[0])
            out.append(((a, b), pairwise_edit_distance(t, l, vocab)))
    return out


def project_truth(structure: Dag | LatentModel, names: Sequence[str] | None = None) -> HybridGraph:
    if isinstance(structure, LatentModel):
        return latent_projection(structure, names)
    return dag_to_hybrid(structure, names)


# --- alpha search ----------------------------------------------------------

@dataclass
class Case:
    """A dataset together with the structure that generated it."""

    data: Dataset
    truth: Dag | LatentModel
    dataset_id: str = ""
    cache: PValueCache = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.cache = PValueCache(self.data)

    @property
    def is_latent(self) -> bool:
        return isinstance(self.truth, LatentModel)

    def truth_graph(self) -> HybridGraph:
        return project_truth(self.truth, self.data.names)


def learn(case: Case, learner: str, alpha: float, catalog: TriggerCatalog | None = None) -> LearnResult:
    if learner == "pc":
        return LearnResult("hybrid", pc(case.data, alpha, case.cache))
    if learner == "trigger_pc":
        if catalog is None:
            raise ValueError("trigger_pc needs a trigger catalog")
        return trigger_pc(case.data, alpha, catalog, case.cache)
    raise ValueError(f"unknown learner {learner!r}")


@dataclass
class AlphaSearchResult:
    best_alpha: float
    samples: list[tuple[float, float]]

    @property
    def distances(self) -> np.ndarray:
        return np.array([d for _, d in self.samples])

    @property
    def min_distance(self) -> float:
        return float(self.distances.min())

    @property
    def max_distance(self) -> float:
        return float(self.distances.max())

    @property
    def mean_distance(self) -> float:
        return float(self.distances.mean())


def optimize_alpha(cases: Sequence[Case], learner: str = "pc", n_samples: int = 200, seed: int = 0,
                   catalog: TriggerCatalog | None = None, low: float = 0.0, high: float = 0.5) -> AlphaSearchResult:
    """Uniform random alpha search minimizing mean edit distance to the generating structures."""
    if not cases:
        raise ValueError("alpha search needs at least one dataset")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = make_rng(seed)
    # (low, high]: a zero alpha would accept every independence
    alphas = high - rng.random(n_samples) * (high - low)
    truths = [c.truth_graph() for c in cases]
    samples = []
    for alpha in alphas:
        dist = [graph_edit_distance(t, learn(c, learner, float(alpha), catalog).graph)
                for c, t in zip(cases, truths)]
        samples.append((float(alpha), float(np.mean(dist))))
    best = min(samples, key=lambda s: (s[1], s[0]))
    return AlphaSearchResult(best[0], samples)


# --- confusion matrices ----------------------------------------------------

UNDEFINED = float("nan")


def _ratio(num: int, den: int) -> float:
    return num / den if den else UNDEFINED


@dataclass
class ConfusionMatrix:
    tp: int = 0
    fn: int = 0
    tn: int = 0
    fp: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.tn + self.fp

    @property
    def accuracy(self) -> float:
        return _ratio(self.tp + self.tn, self.total)

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def fpr(self) -> float:
        return _ratio(self.fp, self.fp + self.tn)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fn + other.fn, self.tn + other.tn, self.fp + other.fp)

    def metrics(self) -> dict[str, float]:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "fpr": self.fpr}


def latent_verdict(learned: LearnResult | HybridGraph, truth: Dag | LatentModel, strict: bool = False) -> str:
    """One of TP, FN, TN, FP for a single learned graph."""
    graph = learned.graph if isinstance(learned, LearnResult) else learned
    if isinstance(truth, LatentModel):
        a, b = truth.latent_children
        hit = graph.has_bidirected(a, b)
        if hit and strict:
            hit = graph.bidirected() == [(a, b)]
        return "TP" if hit else "FN"
    return "FP" if graph.has_bidirected() else "TN"


def score_latents(results: Sequence[tuple[LearnResult | HybridGraph, Dag | LatentModel]],
                  strict: bool = False) -> ConfusionMatrix:
    cm = ConfusionMatrix()
    for learned, truth in results:
        v = latent_verdict(learned, truth, strict)
        setattr(cm, v.lower(), getattr(cm, v.lower()) + 1)
    return cm


def format_metric(x: float, digits: int = 2) -> str:
    return "undefined" if math.isnan(x) else f"{x:.{digits}f}"
