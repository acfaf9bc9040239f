import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from strategies import dags
from trigger_lab.graph import Dag, enumerate_dags
from trigger_lab.pattern import (
    DependencyPattern,
    all_relabelings,
    cell_layout,
    evidence_sets,
    format_pattern,
    graph_pattern,
    n_cells,
    parse_pattern,
    signature,
)


@pytest.mark.parametrize("n,sets,cells", [(3, 4, 6), (4, 11, 24), (5, 26, 80)])
def test_layout_sizes(n, sets, cells):
    assert len(evidence_sets(n)) == sets
    assert n_cells(n) == cells


def test_evidence_set_order():
    assert evidence_sets(4) == [(), (0,), (1,), (2,), (3,), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert cell_layout(3)[:4] == (((), (0, 1)), ((), (0, 2)), ((), (1, 2)), ((0,), (1, 2)))


def test_layout_counts_match_closed_form():
    for n in range(3, 6):
        expected = sum(len(list(itertools.combinations(range(n), k))) * (n - k) * (n - k - 1) // 2
                       for k in range(n - 1))
        assert n_cells(n) == expected


def test_empty_and_complete_graphs():
    assert not any(graph_pattern(Dag(4, frozenset())).bits)
    complete = Dag(4, frozenset((a, b) for a in range(4) for b in range(a + 1, 4)))
    assert all(graph_pattern(complete).bits)


def test_unconditional_row_is_connectivity():
    for g in enumerate_dags(4):
        p = graph_pattern(g)
        comp = _components(g)
        for a, b in itertools.combinations(range(4), 2):
            same = comp[a] == comp[b]
            assert p.entry((), (a, b)) == (same and not oracles.d_separated(4, g.edges, a, b, []))


def _components(g):
    label = list(range(g.n_nodes))
    for _ in range(g.n_nodes):
        for a, b in g.edges:
            label[a] = label[b] = min(label[a], label[b])
    return label


@pytest.mark.parametrize("n", [3, 4])
def test_patterns_match_path_oracle(n):
    for g in enumerate_dags(n):
        assert graph_pattern(g).bits == oracles.pattern_bits(n, g.edges, list(range(n)))


def test_hidden_node_pattern_matches_oracle():
    g = Dag(5, frozenset({(0, 1), (4, 1), (4, 2), (3, 2)}))
    obs = [0, 1, 2, 3]
    assert graph_pattern(g, obs).bits == oracles.pattern_bits(5, g.edges, obs)


def test_entry_lookup():
    chain = Dag(3, frozenset({(0, 1), (1, 2)}))
    p = graph_pattern(chain)
    assert p.entry((), (0, 2))
    assert not p.entry((1,), (0, 2))
    assert p.entry((), (2, 0)) == p.entry((), (0, 2))


@given(dags(min_nodes=3, max_nodes=5), st.data())
@settings(max_examples=60, deadline=None)
def test_signature_is_label_free(g, data):
    perm = data.draw(st.permutations(range(g.n_nodes)))
    assert signature(graph_pattern(g.relabel(perm))) == signature(graph_pattern(g))
    assert graph_pattern(g).relabel(perm) == graph_pattern(g.relabel(perm))


def test_signatures_separate_markov_classes():
    chain = Dag(3, frozenset({(0, 1), (1, 2)}))
    fork = Dag(3, frozenset({(1, 0), (1, 2)}))
    collider = Dag(3, frozenset({(0, 1), (2, 1)}))
    assert signature(graph_pattern(chain)) == signature(graph_pattern(fork))
    assert signature(graph_pattern(chain)) != signature(graph_pattern(collider))


def test_all_relabelings_shape():
    p = graph_pattern(Dag(4, frozenset({(0, 1)})))
    rel = all_relabelings(p)
    assert rel.shape == (24, 24)
    # exactly the 6 placements of a single dependent pair, each appearing 4 times
    uniq = {tuple(r) for r in rel}
    assert len(uniq) == 6


def test_text_round_trip():
    g = Dag(4, frozenset({(0, 1), (2, 1), (1, 3)}))
    p = graph_pattern(g)
    text = format_pattern(p)
    assert text.splitlines()[0].startswith("S={}: ")
    assert parse_pattern(text, 4) == p


def test_differing_cells():
    a = graph_pattern(Dag(3, frozenset({(0, 1), (1, 2)})))
    b = graph_pattern(Dag(3, frozenset({(0, 1), (2, 1)})))
    diff = a.differing_cells(b)
    assert {(s, p) for s, p, _ in diff} == {((), (0, 2)), ((1,), (0, 2))}


def test_array_round_trip():
    p = graph_pattern(Dag(4, frozenset({(0, 2), (1, 2)})))
    assert DependencyPattern.from_array(4, p.as_array()) == p
    assert p.as_array().dtype == np.bool_
