"""DAGs over integer-indexed nodes: enumeration up to isomorphism and d-separation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_ENUM_NODES = 6


class CycleError(ValueError):
    pass


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class Dag:
    """Immutable DAG on nodes ``0..n_nodes-1``.

    ``edges`` holds ``(parent, child)`` pairs. ``labels`` is display-only and
    never participates in equality of structure keys.
    """

    n_nodes: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[str, ...] | None = None
    _parents: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _children: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        parents = [0] * self.n_nodes
        children = [0] * self.n_nodes
        for a, b in edges:
            if not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
                raise ValueError(f"edge {a}->{b} out of range for {self.n_nodes} nodes")
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            parents[b] |= 1 << a
            children[a] |= 1 << b
        object.__setattr__(self, "_parents", tuple(parents))
        object.__setattr__(self, "_children", tuple(children))
        if self.labels is not None and len(self.labels) != self.n_nodes:
            raise ValueError("labels must name every node")
        if _topo_order(parents, self.n_nodes) is None:
            raise CycleError(f"edge set {sorted(edges)} contains a directed cycle")

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, labels: Sequence[str] | None = None) -> "Dag":
        adj = np.asarray(adj)
        rows, cols = np.nonzero(adj)
        return cls(adj.shape[0], frozenset(zip(rows.tolist(), cols.tolist())),
                   tuple(labels) if labels is not None else None)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n_nodes, self.n_nodes), dtype=np.uint8)
        for a, b in self.edges:
            adj[a, b] = 1
        return adj

    def parents(self, v: int) -> list[int]:
        return _bits(self._parents[v])

    def children(self, v: int) -> list[int]:
        return _bits(self._children[v])

    def parent_mask(self, v: int) -> int:
        return self._parents[v]

    def child_mask(self, v: int) -> int:
        return self._children[v]

    def topological_order(self) -> list[int]:
        order = _topo_order(list(self._parents), self.n_nodes)
        assert order is not None
        return order

    def relabel(self, perm: Sequence[int]) -> "Dag":
        """Return the DAG with node ``i`` renamed to ``perm[i]``."""
        return Dag(self.n_nodes, frozenset((perm[a], perm[b]) for a, b in self.edges))

    def name(self, v: int) -> str:
        if self.labels is not None:
            return self.labels[v]
        return str(v)

    def __len__(self) -> int:
        return self.n_nodes


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _topo_order(parents: Sequence[int], n: int) -> list[int] | None:
    placed = 0
    order: list[int] = []
    remaining = list(range(n))
    while remaining:
        ready = [v for v in remaining if parents[v] & ~placed == 0]
        if not ready:
            return None
        for v in ready:
            placed |= 1 << v
            order.append(v)
        remaining = [v for v in remaining if not placed >> v & 1]
    return order


def is_acyclic(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    parents = [0] * n
    for a, b in edges:
        if a == b:
            return False
        parents[b] |= 1 << a
    return _topo_order(parents, n) is not None


def is_weakly_connected(g: Dag) -> bool:
    if g.n_nodes <= 1:
        return True
    nbrs = [g.parent_mask(v) | g.child_mask(v) for v in range(g.n_nodes)]
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= nbrs[v]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << g.n_nodes) - 1


def has_isolated_node(g: Dag) -> bool:
    return any(g.parent_mask(v) == 0 and g.child_mask(v) == 0 for v in range(g.n_nodes))


# --- canonical forms -------------------------------------------------------

@lru_cache(maxsize=None)
def _permutations(n: int, fixed: int | None = None) -> np.ndarray:
    """All permutations of ``range(n)``; with ``fixed``, that node maps to itself."""
    free = [i for i in range(n) if i != fixed]
    perms = []
    for p in itertools.permutations(free):
        if fixed is None:
            perms.append(p)
        else:
            full = list(p)
            full.insert(fixed, fixed)
            perms.append(tuple(full))
    return np.array(perms, dtype=np.intp).reshape(-1, n)


def _min_row_key(rows: np.ndarray) -> bytes:
    """Lexicographically smallest packed bit string among boolean ``rows``."""
    packed = np.packbits(rows.astype(np.uint8), axis=1)
    order = np.lexsort(packed.T[::-1])
    return packed[order[0]].tobytes()


def canonical_form(g: Dag, distinguished: int | None = None) -> bytes:
    """Permutation-invariant key for ``g``.

    The key is the minimal adjacency bit string over all relabelings. With
    ``distinguished`` set, that node keeps its own slot in every relabeling,
    so it is only ever matched against the distinguished node of another graph.
    """
    n = g.n_nodes
    if distinguished is not None and not 0 <= distinguished < n:
        raise ValueError(f"distinguished node {distinguished} out of range")
    adj = g.adjacency().astype(bool)
    perms = _permutations(n, distinguished)
    # relabeled[k][i, j] = adj[perm^-1(i), perm^-1(j)]; iterating inverses covers the same set
    relabeled = adj[perms[:, :, None], perms[:, None, :]].reshape(len(perms), n * n)
    prefix = bytes([n, 255 if distinguished is None else distinguished])
    return prefix + _min_row_key(relabeled)


def canonical_dag(g: Dag, distinguished: int | None = None) -> Dag:
    """The relabeling of ``g`` that realizes its canonical key."""
    n = g.n_nodes
    adj = g.adjacency().astype(bool)
    perms = _permutations(n, distinguished)
    relabeled = adj[perms[:, :, None], perms[:, None, :]].reshape(len(perms), n * n)
    packed = np.packbits(relabeled.astype(np.uint8), axis=1)
    best = np.lexsort(packed.T[::-1])[0]
    return Dag.from_adjacency(relabeled[best].reshape(n, n), g.labels)


# --- enumeration -----------------------------------------------------------

@lru_cache(maxsize=None)
def _enumerate_keys(n: int) -> tuple[tuple[bytes, Dag], ...]:
    if n == 1:
        g = Dag(1, frozenset())
        return ((canonical_form(g), g),)
    found: dict[bytes, Dag] = {}
    # every DAG has a sink; removing it leaves a DAG on n-1 nodes
    for _, base in _enumerate_keys(n - 1):
        for mask in range(1 << (n - 1)):
            edges = set(base.edges)
            edges.update((p, n - 1) for p in _bits(mask))
            g = Dag(n, frozenset(edges))
            key = canonical_form(g)
            if key not in found:
                found[key] = canonical_dag(g)
    return tuple(sorted(found.items()))


def enumerate_dags(n: int) -> list[Dag]:
    """One representative per isomorphism class of DAGs on ``n`` unlabeled nodes.

    Representatives are in canonical labeling and sorted by canonical key.
    """
    if not 1 <= n <= MAX_ENUM_NODES:
        raise SizeLimitError(f"DAG enumeration supports 1..{MAX_ENUM_NODES} nodes, got {n}")
    return [g for _, g in _enumerate_keys(n)]


# --- d-separation ----------------------------------------------------------

def _ancestor_mask(g: Dag, mask: int) -> int:
    result = mask
    frontier = mask
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.parent_mask(v)
        frontier = nxt & ~result
        result |= nxt
    return result


def d_connected_set(g: Dag, x: int, z: int) -> int:
    """Bitmask of nodes d-connected to ``x`` given the node set bitmask ``z``.

    Reachability over (node, direction) states: "up" means the trail arrived
    from a child, "down" means it arrived from a parent.
    """
    anc_z = _ancestor_mask(g, z)
    visited_up = 0
    visited_down = 0
    reachable = 0
    stack = [(x, True)]
    while stack:
        v, up = stack.pop()
        bit = 1 << v
        if up:
            if visited_up & bit:
                continue
            visited_up |= bit
        else:
            if visited_down & bit:
                continue
            visited_down |= bit
        in_z = z & bit
        if not in_z:
            reachable |= bit
        if up and not in_z:
            for p in _bits(g.parent_mask(v)):
                stack.append((p, True))
            for c in _bits(g.child_mask(v)):
                stack.append((c, False))
        elif not up:
            if not in_z:
                for c in _bits(g.child_mask(v)):
                    stack.append((c, False))
            if anc_z & bit:
                for p in _bits(g.parent_mask(v)):
                    stack.append((p, True))
    return reachable & ~(1 << x)


def d_separated(g: Dag, x: int, y: int, z: Iterable[int]) -> bool:
    zmask = 0
    for v in z:
        zmask |= 1 << v
    if x == y:
        raise ValueError("x and y must differ")
    if zmask >> x & 1 or zmask >> y & 1:
        raise ValueError("x and y must not be in the conditioning set")
    return not d_connected_set(g, x, zmask) >> y & 1


# --- text format -----------------------------------------------------------

def format_dag(g: Dag) -> str:
    lines = [f"n={g.n_nodes}"]
    lines.extend(f"{a} -> {b}" for a, b in sorted(g.edges))
    return "\n".join(lines)


def format_dags(graphs: Iterable[Dag]) -> str:
    return "\n\n".join(format_dag(g) for g in graphs) + "\n"


def parse_dags(text: str) -> list[Dag]:
    graphs = []
    for block in text.strip().split("\n\n"):
        lines = [ln.strip() for ln in block.strip().splitlines() if ln.strip()]
        if not lines:
            continue
        if not lines[0].startswith("n="):
            raise ValueError(f"record must start with 'n=<count>', got {lines[0]!r}")
        n = int(lines[0][2:])
        edges = []
        for ln in lines[1:]:
            a, _, b = ln.partition("->")
            edges.append((int(a), int(b)))
        graphs.append(Dag(n, frozenset(edges)))
    return graphs
