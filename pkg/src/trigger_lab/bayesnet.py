"""Discrete Bayesian networks with uniform arity: CPTs, exact joints, forward sampling, arc MI."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import Dag

MAX_JOINT_STATES = 3 ** 7


def make_rng(seed: int) -> np.random.Generator:
    # PCG64 streams are identical across platforms for a given seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class BayesNet:
    """CPTs over a fixed DAG.

    ``cpts[v]`` has shape ``(arity ** n_parents, arity)``. Row ``r`` encodes the
    parent configuration in mixed radix over ``structure.parents(v)`` (ascending
    node order, first parent most significant).
    """

    structure: Dag
    arity: int
    cpts: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.cpts) != self.structure.n_nodes:
            raise ValueError("need one CPT per node")
        for v, t in enumerate(self.cpts):
            k = len(self.structure.parents(v))
            if t.shape != (self.arity ** k, self.arity):
                raise ValueError(f"CPT of node {v} has shape {t.shape}, expected {(self.arity ** k, self.arity)}")
            if (t < 0).any() or not np.allclose(t.sum(axis=1), 1.0, atol=1e-9):
                raise ValueError(f"CPT rows of node {v} are not distributions")

    @property
    def n_nodes(self) -> int:
        return self.structure.n_nodes

    def row_index(self, v: int, values: np.ndarray) -> np.ndarray:
        """CPT row for each sample, given a ``(n_samples, n_nodes)`` value array."""
        idx = np.zeros(values.shape[0], dtype=np.intp)
        for p in self.structure.parents(v):
            idx = idx * self.arity + values[:, p]
        return idx

    def with_cpts(self, cpts: Sequence[np.ndarray]) -> "BayesNet":
        return BayesNet(self.structure, self.arity, tuple(np.asarray(c, dtype=float) for c in cpts))


def random_cpts(g: Dag, arity: int, seed: int | np.random.Generator) -> BayesNet:
    """Every CPT row drawn from a flat Dirichlet."""
    if arity not in (2, 3):
        raise ValueError(f"arity must be 2 or 3, got {arity}")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    cpts = []
    for v in range(g.n_nodes):
        rows = arity ** len(g.parents(v))
        cpts.append(rng.dirichlet(np.ones(arity), size=rows))
    return BayesNet(g, arity, tuple(cpts))


def joint_distribution(net: BayesNet) -> np.ndarray:
    """Exact joint as an array with one axis per node."""
    n, r = net.n_nodes, net.arity
    if r ** n > MAX_JOINT_STATES:
        raise ValueError(f"joint over {r}^{n} states exceeds the {MAX_JOINT_STATES}-state limit")
    states = np.array(np.unravel_index(np.arange(r ** n), (r,) * n)).T
    prob = np.ones(r ** n)
    for v in range(n):
        prob *= net.cpts[v][net.row_index(v, states), states[:, v]]
    return prob.reshape((r,) * n)


def pair_marginal(joint: np.ndarray, a: int, b: int) -> np.ndarray:
    axes = tuple(i for i in range(joint.ndim) if i not in (a, b))
    m = joint.sum(axis=axes)
    return m if a < b else m.T


def mutual_information(pxy: np.ndarray) -> float:
    """MI in bits of a 2-D joint table."""
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    mask = pxy > 0
    mi = float((pxy[mask] * np.log2(pxy[mask] / (px @ py)[mask])).sum())
    return max(mi, 0.0)


@dataclass(frozen=True)
class ArcStrength:
    arc: tuple[int, int]
    mi: float


def arc_mutual_information(net: BayesNet, arc: tuple[int, int], joint: np.ndarray | None = None) -> ArcStrength:
    if arc not in net.structure.edges:
        raise KeyError(f"arc {arc} is not in the structure")
    if joint is None:
        joint = joint_distribution(net)
    return ArcStrength(arc, mutual_information(pair_marginal(joint, *arc)))


def arc_strengths(net: BayesNet) -> list[ArcStrength]:
    joint = joint_distribution(net)
    return [arc_mutual_information(net, e, joint) for e in sorted(net.structure.edges)]


def network_strength(net: BayesNet, aggregate: str = "mean") -> float:
    """Parent-child mutual information over all arcs, in bits, reduced by mean (or min)."""
    if not net.structure.edges:
        raise ValueError("network strength is undefined for an edgeless structure")
    mis = [s.mi for s in arc_strengths(net)]
    if aggregate == "mean":
        return float(np.mean(mis))
    if aggregate == "min":
        return float(np.min(mis))
    raise ValueError(f"unknown aggregate {aggregate!r}")


# --- datasets --------------------------------------------------------------

@dataclass
class Dataset:
    """Complete discrete samples, one column per variable."""

    values: np.ndarray
    arity: int
    names: tuple[str, ...] | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.names is None and self.values.ndim == 2:
            self.names = default_names(self.values.shape[1])
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("values must be (n_rows, n_vars) with one name per column")
        if self.values.size and (self.values.min() < 0 or self.values.max() >= self.arity):
            raise ValueError(f"values must lie in [0, {self.arity})")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def select(self, cols: Sequence[int]) -> "Dataset":
        return Dataset(self.values[:, list(cols)], self.arity,
                       tuple(self.names[c] for c in cols), dict(self.provenance))

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.names)
            w.writerows(self.values.tolist())
        meta = dict(self.provenance, arity=self.arity, n_rows=self.n_rows)
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path, arity: int | None = None) -> "Dataset":
        path = Path(path)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        names = tuple(rows[0])
        values = np.array([[int(x) for x in r] for r in rows[1:]], dtype=np.int64).reshape(-1, len(names))
        meta_path = path.with_suffix(".json")
        provenance = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        if arity is None:
            arity = int(provenance.get("arity", values.max() + 1 if values.size else 1))
        return cls(values, arity, names, provenance)


def default_names(n: int) -> tuple[str, ...]:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return tuple(letters[i] if n <= 26 else f"X{i}" for i in range(n))


def forward_sample(net: BayesNet, n: int, seed: int, hidden: Sequence[int] = (),
                   names: Sequence[str] | None = None) -> Dataset:
    """Ancestral sampling in topological order; ``hidden`` columns are dropped afterwards."""
    if n < 1:
        raise ValueError("need at least one row")
    rng = make_rng(seed)
    vals = np.zeros((n, net.n_nodes), dtype=np.int64)
    for v in net.structure.topological_order():
        probs = np.cumsum(net.cpts[v], axis=1)[net.row_index(v, vals)]
        u = rng.random(n)
        vals[:, v] = np.minimum((u[:, None] >= probs).sum(axis=1), net.arity - 1)
    keep = [v for v in range(net.n_nodes) if v not in set(hidden)]
    if names is None:
        names = default_names(len(keep))
    return Dataset(vals[:, keep], net.arity, tuple(names), {"seed": seed})


def empirical_joint(data: Dataset) -> np.ndarray:
    r = data.arity
    flat = np.ravel_multi_index(data.values.T, (r,) * data.n_vars)
    counts = np.bincount(flat, minlength=r ** data.n_vars)
    return (counts / data.n_rows).reshape((r,) * data.n_vars)


def format_net(net: BayesNet, strength: float | None = None) -> str:
    """Plain-text CPT listing, one row per parent configuration."""
    lines = [f"nodes={net.n_nodes} arity={net.arity}"]
    lines.extend(f"edge {a} -> {b}" for a, b in sorted(net.structure.edges))
    if strength is not None:
        lines.append(f"strength={strength:.12g}")
    for v, t in enumerate(net.cpts):
        lines.append(f"cpt {v} parents={','.join(map(str, net.structure.parents(v)))}")
        lines.extend(" ".join(repr(float(x)) for x in row) for row in t)
    return "\n".join(lines) + "\n"


def parse_net(text: str) -> BayesNet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = dict(tok.split("=") for tok in lines[0].split())
    n, arity = int(head["nodes"]), int(head["arity"])
    edges = []
    cpts: list[list[list[float]]] = []
    for ln in lines[1:]:
        if ln.startswith("edge "):
            a, _, b = ln[5:].partition("->")
            edges.append((int(a), int(b)))
        elif ln.startswith("cpt "):
            cpts.append([])
        elif ln.startswith("strength="):
            continue
        else:
            cpts[-1].append([float(x) for x in ln.split()])
    return BayesNet(Dag(n, frozenset(edges)), arity, tuple(np.array(c, dtype=float) for c in cpts))
