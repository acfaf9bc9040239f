import numpy as np
import pytest

import oracles
from trigger_lab.graph import Dag, canonical_form, enumerate_dags, has_isolated_node
from trigger_lab.pattern import graph_pattern
from trigger_lab.trigger_search import (
    LatentModel,
    enumerate_latent_models,
    find_triggers,
    format_catalog,
    is_trigger,
    nearest_observed,
    observed_signature_index,
    parse_catalog,
)


@pytest.fixture(scope="module")
def cat4():
    return find_triggers(4)


def test_tiny_latent_spaces():
    assert enumerate_latent_models(1) == []
    models = enumerate_latent_models(2)
    # H -> 0, H -> 1 with or without an arc between 0 and 1
    assert len(models) == 2


def test_latent_models_have_no_isolated_nodes():
    for m in enumerate_latent_models(4):
        assert not has_isolated_node(m.full)
        assert m.full.parents(m.hidden) == []
        assert sorted(m.full.children(m.hidden)) == list(m.latent_children)


def test_latent_models_distinct_up_to_relabeling():
    models = enumerate_latent_models(3)
    keys = {canonical_form(m.full, m.hidden) for m in models}
    assert len(keys) == len(models)


def test_no_triggers_on_three_variables():
    assert find_triggers(3).table_row() == (6, 4, 0)


def test_four_variable_triggers(cat4):
    assert cat4.table_row() == (31, 24, 2)
    labeled = {graph_pattern(Dag(4, e)).bits for e in oracles.labeled_dags(4)}
    for t in cat4.triggers:
        # the observed pattern is not produced by any labeled four-node DAG
        assert t.model.pattern.bits not in labeled
        assert t.model.pattern.bits == oracles.pattern_bits(5, t.model.full.edges, [0, 1, 2, 3])
        assert t.distinguishing


def test_non_triggers_have_a_witness(cat4):
    index = observed_signature_index(4)
    labeled = {}
    for e in oracles.labeled_dags(4):
        labeled.setdefault(graph_pattern(Dag(4, e)).bits, e)
    trig_keys = {t.model.canonical_key() for t in cat4.triggers}
    for m in enumerate_latent_models(4):
        if m.canonical_key() in trig_keys:
            continue
        assert not is_trigger(m, index)
        assert m.pattern.bits in labeled


def test_hidden_collider_model_is_a_trigger(cat4):
    # W -> X <- H -> Y <- Z
    m = LatentModel(Dag(4, frozenset({(0, 1), (3, 2)})), (1, 2))
    assert is_trigger(m, cat4.observed_signatures)
    keys = {canonical_form(t.model.full) for t in cat4.triggers}
    assert canonical_form(m.full) in keys


def test_nearest_observed_distance_matches_distinguishing(cat4):
    dags = enumerate_dags(4)
    for t in cat4.triggers:
        _, pat, dist = nearest_observed(t.model, dags)
        assert dist == len(t.distinguishing) > 0
        assert np.count_nonzero(pat.as_array() != t.model.pattern.as_array()) == dist


def test_connected_comparison_never_finds_fewer(cat4):
    alt = find_triggers(4, comparison="connected")
    assert len(alt.triggers) >= len(cat4.triggers)


def test_catalog_round_trip(tmp_path, cat4):
    path = tmp_path / "four.trg"
    path.write_text(format_catalog(cat4))
    back = parse_catalog(path.read_text())
    assert back.table_row() == cat4.table_row()
    assert [t.model.full.edges for t in back.triggers] == [t.model.full.edges for t in cat4.triggers]
    assert [t.signature for t in back.triggers] == [t.signature for t in cat4.triggers]


def test_catalog_parser_checks_signatures(cat4):
    text = format_catalog(cat4)
    sig = cat4.triggers[0].signature.hex()
    bad = text.replace(sig, "00" * (len(sig) // 2), 1)
    with pytest.raises(ValueError):
        parse_catalog(bad)


@pytest.mark.parametrize("n", [2, 6])
def test_search_size_bounds(n):
    with pytest.raises(ValueError):
        find_triggers(n)
