"""Single-latent-variable models and the search for triggers among them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .graph import (
    Dag,
    canonical_form,
    enumerate_dags,
    has_isolated_node,
    is_weakly_connected,
)
from .pattern import DependencyPattern, all_relabelings, graph_pattern, signature


@dataclass(frozen=True)
class LatentModel:
    """Observed DAG ``base`` plus a hidden root ``H`` whose only children are ``latent_children``."""

    base: Dag
    latent_children: tuple[int, int]

    def __post_init__(self) -> None:
        a, b = sorted(self.latent_children)
        if a == b or not 0 <= a < self.base.n_nodes or not 0 <= b < self.base.n_nodes:
            raise ValueError(f"invalid latent children {self.latent_children}")
        object.__setattr__(self, "latent_children", (a, b))

    @property
    def n_observed(self) -> int:
        return self.base.n_nodes

    @property
    def hidden(self) -> int:
        return self.base.n_nodes

    @cached_property
    def full(self) -> Dag:
        h = self.hidden
        a, b = self.latent_children
        return Dag(h + 1, self.base.edges | {(h, a), (h, b)})

    @cached_property
    def pattern(self) -> DependencyPattern:
        return graph_pattern(self.full, list(range(self.n_observed)))

    @cached_property
    def signature(self) -> bytes:
        return signature(self.pattern)

    def canonical_key(self) -> bytes:
        return canonical_form(self.full, distinguished=self.hidden)

    def relabel(self, perm) -> "LatentModel":
        a, b = self.latent_children
        return LatentModel(self.base.relabel(perm), (perm[a], perm[b]))


@dataclass
class Trigger:
    model: LatentModel
    signature: bytes
    # cells where the trigger differs from its closest fully observed DAG
    distinguishing: list = field(default_factory=list)


@dataclass
class TriggerCatalog:
    n_observed: int
    triggers: list[Trigger]
    observed_signatures: set[bytes]
    n_dags: int = 0
    n_connected: int = 0
    n_latent_models: int = 0

    def table_row(self) -> tuple[int, int, int]:
        return (self.n_dags, self.n_connected, len(self.triggers))


def enumerate_latent_models(n: int) -> list[LatentModel]:
    """One model per isomorphism class (hidden node distinguished), sorted by canonical key."""
    if n < 2:
        return []
    found: dict[bytes, LatentModel] = {}
    for base in enumerate_dags(n):
        for pair in itertools.combinations(range(n), 2):
            m = LatentModel(base, pair)
            if has_isolated_node(m.full):
                continue
            key = m.canonical_key()
            if key not in found:
                found[key] = m
    return [found[k] for k in sorted(found)]


def observed_signature_index(n: int, dags: Iterable[Dag] | None = None) -> dict[bytes, Dag]:
    """Signature of every fully observed DAG on ``n`` nodes, mapped to one witness DAG."""
    index: dict[bytes, Dag] = {}
    for g in dags if dags is not None else enumerate_dags(n):
        index.setdefault(signature(graph_pattern(g)), g)
    return index


def is_trigger(m: LatentModel, observed_signatures: set[bytes] | dict) -> bool:
    return m.signature not in observed_signatures


def nearest_observed(m: LatentModel, dags: Iterable[Dag]) -> tuple[Dag, DependencyPattern, int]:
    """Fully observed DAG (under its best relabeling) with the fewest differing cells."""
    target = m.pattern.as_array()
    best = None
    for g in dags:
        rel = _relabelings_of(g)
        dist = (rel != target).sum(axis=1)
        k = int(dist.argmin())
        if best is None or dist[k] < best[2]:
            best = (g, DependencyPattern.from_array(m.n_observed, rel[k]), int(dist[k]))
    assert best is not None
    return best


_RELABEL_CACHE: dict[Dag, np.ndarray] = {}


def _relabelings_of(g: Dag) -> np.ndarray:
    if g not in _RELABEL_CACHE:
        _RELABEL_CACHE[g] = all_relabelings(graph_pattern(g))
    return _RELABEL_CACHE[g]


def find_triggers(n: int, comparison: str = "all", dedupe: str = "structure") -> TriggerCatalog:
    """Latent models whose observed pattern no fully observed DAG reproduces.

    ``comparison`` selects the explaining set: ``"all"`` DAGs on ``n`` nodes or
    only ``"connected"`` ones. ``dedupe`` decides when two triggers count once:
    ``"structure"`` merges triggers whose full DAGs (hidden node included) are
    isomorphic as plain DAGs, ``"latent"`` keeps the hidden node distinguished.
    """
    if comparison not in ("all", "connected"):
        raise ValueError(f"unknown comparison set {comparison!r}")
    if dedupe not in ("structure", "latent"):
        raise ValueError(f"unknown dedupe policy {dedupe!r}")
    if not 3 <= n <= 5:
        raise ValueError(f"trigger search is validated for 3..5 observed variables, got {n}")
    dags = enumerate_dags(n)
    connected = [g for g in dags if is_weakly_connected(g)]
    pool = dags if comparison == "all" else connected
    observed = observed_signature_index(n, pool)
    models = enumerate_latent_models(n)
    triggers = []
    seen: set[bytes] = set()
    for m in models:
        if is_trigger(m, observed):
            if dedupe == "structure":
                key = canonical_form(m.full)
                if key in seen:
                    continue
                seen.add(key)
            _, closest, _ = nearest_observed(m, pool)
            triggers.append(Trigger(m, m.signature, m.pattern.differing_cells(closest)))
    return TriggerCatalog(
        n_observed=n,
        triggers=triggers,
        observed_signatures=set(observed),
        n_dags=len(dags),
        n_connected=len(connected),
        n_latent_models=len(models),
    )


# --- catalog file ----------------------------------------------------------

def _model_edges(m: LatentModel) -> str:
    h = m.hidden
    parts = []
    for a, b in sorted(m.full.edges):
        parts.append(f"{'H' if a == h else a}->{'H' if b == h else b}")
    return " ".join(parts)


def format_catalog(cat: TriggerCatalog) -> str:
    """Structured text: a header, then one blank-line separated record per trigger."""
    lines = [f"# trigger catalog n_observed={cat.n_observed}",
             f"# dags={cat.n_dags} connected={cat.n_connected} triggers={len(cat.triggers)}", ""]
    for i, t in enumerate(cat.triggers):
        lines.append(f"trigger {i}")
        lines.append(f"n={t.model.n_observed}")
        lines.append(f"edges: {_model_edges(t.model)}")
        lines.append(f"signature: {t.signature.hex()}")
        # cells where the trigger and its closest fully observed DAG disagree
        for s, (a, b), dep in t.distinguishing:
            ours, theirs = ("dependent", "independent") if dep else ("independent", "dependent")
            lines.append(f"  {a},{b} | {{{','.join(map(str, s))}}}: {ours} (closest DAG: {theirs})")
        lines.append("")
    return "\n".join(lines)


def parse_catalog(text: str) -> TriggerCatalog:
    n = None
    dags = connected = 0
    triggers = []
    for block in text.split("\n\n"):
        rows = [ln.strip() for ln in block.strip().splitlines() if ln.strip()]
        for ln in rows:
            if ln.startswith("# trigger catalog"):
                n = int(ln.split("n_observed=")[1])
            elif ln.startswith("# dags="):
                fields = dict(tok.split("=") for tok in ln[2:].split())
                dags, connected = int(fields["dags"]), int(fields["connected"])
        rec = [ln for ln in rows if not ln.startswith("#")]
        if not rec:
            continue
        if not rec[0].startswith("trigger "):
            raise ValueError(f"malformed catalog record starting {rec[0]!r}")
        k = int(rec[1][2:])
        edges, children = [], []
        for tok in rec[2][len("edges:"):].split():
            a, b = tok.split("->")
            if a == "H":
                children.append(int(b))
            else:
                edges.append((int(a), int(b)))
        model = LatentModel(Dag(k, frozenset(edges)), tuple(children))
        sig = bytes.fromhex(rec[3].split(":", 1)[1].strip())
        if model.signature != sig:
            raise ValueError(f"signature mismatch for {rec[0]}")
        triggers.append(Trigger(model, sig, []))
    if n is None:
        n = triggers[0].model.n_observed if triggers else 0
    return TriggerCatalog(n, triggers, set(), dags, connected)
