"""PC structure learning into hybrid graphs, and the trigger-filtered PC wrapper."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .bayesnet import Dataset
from .citest import PValueCache, empirical_pattern
from .graph import Dag, _permutations
from .pattern import all_relabelings
from .trigger_search import LatentModel, TriggerCatalog


class Mark(Enum):
    TAIL = "tail"
    ARROW = "arrow"
    CIRCLE = "circle"


T, A, C = Mark.TAIL, Mark.ARROW, Mark.CIRCLE

# first char is the mark at the left node, second at the right node
_LEFT = {T: "-", A: "<", C: "o"}
_RIGHT = {T: "-", A: ">", C: "o"}
_PARSE_LEFT = {v: k for k, v in _LEFT.items()}
_PARSE_RIGHT = {v: k for k, v in _RIGHT.items()}


@dataclass
class HybridGraph:
    """Mixed graph: ``links[(a, b)]`` with ``a < b`` holds ``(mark at a, mark at b)``."""

    n_nodes: int
    links: dict[tuple[int, int], tuple[Mark, Mark]] = field(default_factory=dict)
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        norm = {}
        for (a, b), (ma, mb) in self.links.items():
            if a == b or not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
                raise ValueError(f"bad link {a}-{b}")
            norm[(a, b) if a < b else (b, a)] = (ma, mb) if a < b else (mb, ma)
        self.links = norm

    def copy(self) -> "HybridGraph":
        return HybridGraph(self.n_nodes, dict(self.links), self.names)

    def marks(self, a: int, b: int) -> tuple[Mark, Mark] | None:
        """Marks at ``a`` and at ``b`` for the link between them, or None."""
        if a < b:
            return self.links.get((a, b))
        m = self.links.get((b, a))
        return None if m is None else (m[1], m[0])

    def set_link(self, a: int, b: int, mark_a: Mark, mark_b: Mark) -> None:
        if a < b:
            self.links[(a, b)] = (mark_a, mark_b)
        else:
            self.links[(b, a)] = (mark_b, mark_a)

    def remove_link(self, a: int, b: int) -> None:
        self.links.pop((min(a, b), max(a, b)), None)

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.links

    def neighbors(self, v: int) -> list[int]:
        return sorted({b for a, b in self.links if a == v} | {a for a, b in self.links if b == v})

    def is_directed(self, a: int, b: int) -> bool:
        return self.marks(a, b) == (T, A)

    def is_undirected(self, a: int, b: int) -> bool:
        return self.marks(a, b) == (T, T)

    def bidirected(self) -> list[tuple[int, int]]:
        return sorted(k for k, m in self.links.items() if m == (A, A))

    def has_bidirected(self, a: int | None = None, b: int | None = None) -> bool:
        if a is None:
            return bool(self.bidirected())
        return self.marks(a, b) == (A, A)

    def relabel(self, perm: Sequence[int]) -> "HybridGraph":
        out = HybridGraph(self.n_nodes)
        for (a, b), (ma, mb) in self.links.items():
            out.set_link(perm[a], perm[b], ma, mb)
        return out

    def name(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HybridGraph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and self.links == other.links


def format_hybrid(g: HybridGraph) -> str:
    """One line per link, ``A <mark><mark> B``; absent pairs are omitted."""
    lines = []
    for (a, b), (ma, mb) in sorted(g.links.items()):
        lines.append(f"{g.name(a)} {_LEFT[ma]}{_RIGHT[mb]} {g.name(b)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_hybrid(text: str, names: Sequence[str] | None = None) -> HybridGraph:
    """Read the link format back; node names come from ``names`` or first appearance.

    A ``nodes: A B C`` header line, when present, fixes names and order.
    """
    records = []
    declared = list(names) if names is not None else None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("nodes:"):
            if declared is None:
                declared = line[len("nodes:"):].split()
            continue
        parts = line.split()
        if len(parts) != 3 or len(parts[1]) != 2:
            raise ValueError(f"line {lineno}: expected '<A> <mark><mark> <B>', got {raw!r}")
        left, right = parts[1]
        if left not in _PARSE_LEFT or right not in _PARSE_RIGHT:
            raise ValueError(f"line {lineno}: unknown edge marks {parts[1]!r}")
        records.append((lineno, parts[0], parts[2], _PARSE_LEFT[left], _PARSE_RIGHT[right]))
    order = list(declared) if declared is not None else []
    if declared is None:
        for _, a, b, _, _ in records:
            for x in (a, b):
                if x not in order:
                    order.append(x)
    index = {nm: i for i, nm in enumerate(order)}
    g = HybridGraph(len(order), names=tuple(order))
    for lineno, a, b, ma, mb in records:
        if a not in index or b not in index:
            raise ValueError(f"line {lineno}: unknown node in {a!r}-{b!r}")
        if a == b:
            raise ValueError(f"line {lineno}: self-link on {a!r}")
        g.set_link(index[a], index[b], ma, mb)
    return g


def dag_to_hybrid(g: Dag, names: Sequence[str] | None = None) -> HybridGraph:
    h = HybridGraph(g.n_nodes, names=tuple(names) if names is not None else g.labels)
    for a, b in g.edges:
        h.set_link(a, b, T, A)
    return h


def latent_projection(m: LatentModel, names: Sequence[str] | None = None) -> HybridGraph:
    """Observed arcs as directed links plus a bi-directed link between the hidden node's children."""
    h = dag_to_hybrid(m.base, names)
    h.set_link(*m.latent_children, A, A)
    return h


# --- PC --------------------------------------------------------------------

@dataclass
class Skeleton:
    adjacency: np.ndarray
    sepsets: dict[tuple[int, int], tuple[int, ...]]


def pc_skeleton(n: int, cache: PValueCache, alpha: float, sepset_rule: str = "first",
                stable: bool = False) -> Skeleton:
    """Skeleton search with conditioning sets drawn from current adjacencies.

    Pairs are visited in column order and candidate sets in lexicographic order.
    ``sepset_rule="first"`` removes a link at the first separating set found;
    ``"max_p"`` records the separating set with the largest p-value among those
    of the current size, which makes the choice independent of labels. With
    ``stable`` the adjacencies used for candidates are frozen per level.
    """
    if sepset_rule not in ("first", "max_p"):
        raise ValueError(f"unknown sepset rule {sepset_rule!r}")
    adj = np.ones((n, n), dtype=bool)
    np.fill_diagonal(adj, False)
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}
    level = 0
    while True:
        frozen = [set(np.flatnonzero(adj[v]).tolist()) for v in range(n)]
        if all(len(frozen[v]) - 1 < level for v in range(n)):
            break
        removed = []
        for x, y in itertools.combinations(range(n), 2):
            if not adj[x, y]:
                continue
            current = frozen if stable else [set(np.flatnonzero(adj[v]).tolist()) for v in (x, y)]
            nx_, ny_ = (current[x], current[y]) if stable else current
            candidates: list[tuple[int, ...]] = []
            for pool in (sorted(nx_ - {y}), sorted(ny_ - {x})):
                for c in itertools.combinations(pool, level):
                    if c not in candidates:
                        candidates.append(c)
            best = None
            for c in candidates:
                p = cache.p_value(x, y, c)
                if p >= alpha and (best is None or p > best[0]):
                    best = (p, c)
                    if sepset_rule == "first":
                        break
            if best is not None:
                if stable:
                    removed.append((x, y, best[1]))
                else:
                    adj[x, y] = adj[y, x] = False
                    sepsets[(x, y)] = best[1]
        for x, y, c in removed:
            adj[x, y] = adj[y, x] = False
            sepsets[(x, y)] = c
        level += 1
    return Skeleton(adj, sepsets)


def orient(n: int, skel: Skeleton, names: Sequence[str] | None = None) -> HybridGraph:
    adj = skel.adjacency
    heads = np.zeros((n, n), dtype=bool)  # heads[a, b]: arrowhead at b on link a-b
    for z in range(n):
        nbrs = np.flatnonzero(adj[z]).tolist()
        for x, y in itertools.combinations(nbrs, 2):
            if adj[x, y]:
                continue
            if z not in skel.sepsets.get((min(x, y), max(x, y)), ()):
                heads[x, z] = heads[y, z] = True
    g = HybridGraph(n, names=tuple(names) if names is not None else None)
    for a, b in itertools.combinations(range(n), 2):
        if adj[a, b]:
            g.set_link(a, b, A if heads[b, a] else T, A if heads[a, b] else T)
    return _apply_meek(g)


def _apply_meek(g: HybridGraph) -> HybridGraph:
    """Meek rules 1-3 applied in synchronous sweeps until nothing changes.

    An undirected link that two rules would orient in opposite directions in the
    same sweep is left undirected.
    """
    n = g.n_nodes
    while True:
        proposals: dict[tuple[int, int], set[tuple[int, int]]] = {}
        for a, b in [k for k, m in g.links.items() if m == (T, T)]:
            for x, y in ((a, b), (b, a)):
                if _meek_orients(g, x, y, n):
                    proposals.setdefault((a, b), set()).add((x, y))
        changed = False
        for key, dirs in proposals.items():
            if len(dirs) == 1:
                x, y = next(iter(dirs))
                g.set_link(x, y, T, A)
                changed = True
        if not changed:
            return g


def _meek_orients(g: HybridGraph, x: int, y: int, n: int) -> bool:
    """Whether the undirected link x - y should become x -> y."""
    for w in range(n):
        if w in (x, y):
            continue
        # R1: w -> x - y with w, y non-adjacent
        if g.is_directed(w, x) and not g.adjacent(w, y):
            return True
        # R2: x -> w -> y
        if g.is_directed(x, w) and g.is_directed(w, y):
            return True
    # R3: x - c -> y, x - d -> y, c and d non-adjacent
    cs = [c for c in range(n) if c not in (x, y) and g.is_undirected(x, c) and g.is_directed(c, y)]
    for c, d in itertools.combinations(cs, 2):
        if not g.adjacent(c, d):
            return True
    return False


def pc(data: Dataset, alpha: float, cache: PValueCache | None = None, sepset_rule: str = "first",
       stable: bool = False) -> HybridGraph:
    if data.n_vars < 2:
        raise ValueError("PC needs at least two variables")
    cache = cache or PValueCache(data)
    skel = pc_skeleton(data.n_vars, cache, alpha, sepset_rule, stable)
    return orient(data.n_vars, skel, data.names)


def strip_bidirected(g: HybridGraph) -> HybridGraph:
    out = g.copy()
    for key, m in g.links.items():
        if m == (A, A):
            out.links[key] = (T, T)
    return out


# --- Trigger-PC ------------------------------------------------------------

@dataclass
class LearnResult:
    kind: str  # "trigger" or "hybrid"
    graph: HybridGraph
    model: LatentModel | None = None
    matched_trigger_id: int | None = None

    @property
    def is_trigger(self) -> bool:
        return self.kind == "trigger"


def match_trigger(data: Dataset, alpha: float, catalog: TriggerCatalog,
                  cache: PValueCache | None = None) -> tuple[int, LatentModel] | None:
    """First (trigger, label assignment) whose pattern equals the data's pattern exactly."""
    if catalog.n_observed != data.n_vars:
        raise ValueError(f"catalog is for {catalog.n_observed} variables, data has {data.n_vars}")
    observed = empirical_pattern(data, alpha, cache).as_array()
    perms = _permutations(data.n_vars)
    for i, trig in enumerate(catalog.triggers):
        hits = np.flatnonzero((all_relabelings(trig.model.pattern) == observed).all(axis=1))
        if hits.size:
            return i, trig.model.relabel(perms[hits[0]].tolist())
    return None


def trigger_pc(data: Dataset, alpha: float, catalog: TriggerCatalog,
               cache: PValueCache | None = None) -> LearnResult:
    """Return a matching trigger structure if the data's pattern is one, else PC without ``<->``."""
    cache = cache or PValueCache(data)
    hit = match_trigger(data, alpha, catalog, cache)
    if hit is not None:
        i, model = hit
        return LearnResult("trigger", latent_projection(model, data.names), model, i)
    return LearnResult("hybrid", strip_bidirected(pc(data, alpha, cache)))
