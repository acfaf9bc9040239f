"""Conditional-dependency patterns over observed variables and their label-free signatures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .graph import Dag, d_connected_set, _permutations, _min_row_key

EvidenceSet = tuple[int, ...]
Pair = tuple[int, int]


@lru_cache(maxsize=None)
def _evidence_sets(n: int) -> tuple[EvidenceSet, ...]:
    out: list[EvidenceSet] = []
    for k in range(n - 1):
        out.extend(itertools.combinations(range(n), k))
    return tuple(out)


def evidence_sets(n: int) -> list[EvidenceSet]:
    """All subsets of ``range(n)`` with at most ``n - 2`` members, by size then lexicographic."""
    if n < 2:
        raise ValueError("need at least two variables")
    return list(_evidence_sets(n))


@lru_cache(maxsize=None)
def cell_layout(n: int) -> tuple[tuple[EvidenceSet, Pair], ...]:
    """Global (evidence set, pair) cell order; part of the on-disk format."""
    cells = []
    for s in _evidence_sets(n):
        rest = [v for v in range(n) if v not in s]
        cells.extend((s, p) for p in itertools.combinations(rest, 2))
    return tuple(cells)


@lru_cache(maxsize=None)
def _cell_index(n: int) -> dict[tuple[EvidenceSet, Pair], int]:
    return {cell: i for i, cell in enumerate(cell_layout(n))}


def n_cells(n: int) -> int:
    return len(cell_layout(n))


@lru_cache(maxsize=None)
def _relabel_tables(n: int) -> np.ndarray:
    """``tables[k][i]`` is the source cell of cell ``i`` after applying permutation ``k``."""
    layout = cell_layout(n)
    index = _cell_index(n)
    perms = _permutations(n)
    tables = np.empty((len(perms), len(layout)), dtype=np.intp)
    for k, perm in enumerate(perms):
        inv = np.argsort(perm)
        for i, (s, (a, b)) in enumerate(layout):
            src_s = tuple(sorted(int(inv[v]) for v in s))
            src_p = tuple(sorted((int(inv[a]), int(inv[b]))))
            tables[k, i] = index[(src_s, src_p)]
    return tables


@dataclass(frozen=True)
class DependencyPattern:
    """One dependence bit per (evidence set, unordered pair) cell, in ``cell_layout`` order."""

    n_observed: int
    bits: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.bits) != n_cells(self.n_observed):
            raise ValueError(
                f"pattern over {self.n_observed} variables needs {n_cells(self.n_observed)} cells, "
                f"got {len(self.bits)}"
            )

    @classmethod
    def from_array(cls, n: int, arr: Sequence[bool] | np.ndarray) -> "DependencyPattern":
        return cls(n, tuple(bool(b) for b in arr))

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool)

    def entry(self, s: Iterable[int], pair: Pair) -> bool:
        key = (tuple(sorted(s)), tuple(sorted(pair)))
        return self.bits[_cell_index(self.n_observed)[key]]

    def relabel(self, perm: Sequence[int]) -> "DependencyPattern":
        """Pattern obtained by renaming variable ``i`` to ``perm[i]``."""
        inv = np.argsort(np.asarray(perm))
        src = np.asarray(self.bits)
        out = []
        for s, (a, b) in cell_layout(self.n_observed):
            key = (tuple(sorted(int(inv[v]) for v in s)), tuple(sorted((int(inv[a]), int(inv[b])))))
            out.append(src[_cell_index(self.n_observed)[key]])
        return DependencyPattern.from_array(self.n_observed, out)

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def differing_cells(self, other: "DependencyPattern") -> list[tuple[EvidenceSet, Pair, bool]]:
        layout = cell_layout(self.n_observed)
        return [(s, p, mine) for (s, p), mine, theirs in zip(layout, self.bits, other.bits)
                if mine != theirs]


def graph_pattern(g: Dag, observed: Sequence[int] | None = None) -> DependencyPattern:
    """Dependency pattern of ``g`` restricted to ``observed`` (default: every node).

    Observed node ``observed[i]`` plays variable ``i``. Hidden nodes stay in the
    graph but never appear in pairs or evidence sets.
    """
    if observed is None:
        observed = list(range(g.n_nodes))
    n = len(observed)
    bits = []
    cache: dict[tuple[int, int], int] = {}
    for s, (a, b) in cell_layout(n):
        zmask = 0
        for v in s:
            zmask |= 1 << observed[v]
        key = (observed[a], zmask)
        if key not in cache:
            cache[key] = d_connected_set(g, observed[a], zmask)
        bits.append(bool(cache[key] >> observed[b] & 1))
    return DependencyPattern(n, tuple(bits))


def signature(p: DependencyPattern) -> bytes:
    """Label-free key: minimum packed pattern over all relabelings of the variables."""
    tables = _relabel_tables(p.n_observed)
    arr = p.as_array()
    return bytes([p.n_observed]) + _min_row_key(arr[tables])


def all_relabelings(p: DependencyPattern) -> np.ndarray:
    """Boolean matrix whose row ``k`` is ``p`` under the ``k``-th permutation."""
    return p.as_array()[_relabel_tables(p.n_observed)]


def format_pattern(p: DependencyPattern, names: Sequence[str] | None = None) -> str:
    """One line per evidence set: ``S={...}: <bits over pairs>``."""
    if names is None:
        names = [str(i) for i in range(p.n_observed)]
    lines = []
    i = 0
    for s in _evidence_sets(p.n_observed):
        rest = p.n_observed - len(s)
        width = rest * (rest - 1) // 2
        chunk = "".join("1" if b else "0" for b in p.bits[i:i + width])
        i += width
        lines.append("S={" + ",".join(names[v] for v in s) + "}: " + chunk)
    return "\n".join(lines)


def parse_pattern(text: str, n: int) -> DependencyPattern:
    bits: list[bool] = []
    for line in text.strip().splitlines():
        _, _, chunk = line.partition(":")
        bits.extend(c == "1" for c in chunk.strip())
    return DependencyPattern(n, tuple(bits))
