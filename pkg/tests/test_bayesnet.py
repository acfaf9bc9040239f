import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import dags
from trigger_lab.bayesnet import (
    BayesNet,
    Dataset,
    arc_mutual_information,
    empirical_joint,
    forward_sample,
    format_net,
    joint_distribution,
    mutual_information,
    network_strength,
    pair_marginal,
    parse_net,
    random_cpts,
)
from trigger_lab.graph import Dag

CHAIN = Dag(3, frozenset({(0, 1), (1, 2)}))


def copy_net(arity):
    eye = np.eye(arity)
    return BayesNet(Dag(2, frozenset({(0, 1)})), arity, (np.full((1, arity), 1 / arity), eye))


def test_random_cpts_deterministic_and_normalized():
    a = random_cpts(CHAIN, 3, seed=7)
    b = random_cpts(CHAIN, 3, seed=7)
    c = random_cpts(CHAIN, 3, seed=8)
    assert all(np.array_equal(x, y) for x, y in zip(a.cpts, b.cpts))
    assert not all(np.array_equal(x, y) for x, y in zip(a.cpts, c.cpts))
    for t in a.cpts:
        assert np.allclose(t.sum(axis=1), 1.0)
    assert [t.shape for t in a.cpts] == [(1, 3), (3, 3), (3, 3)]


@given(dags(max_nodes=5), st.sampled_from([2, 3]), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_joint_sums_to_one(g, arity, seed):
    joint = joint_distribution(random_cpts(g, arity, seed))
    assert joint.shape == (arity,) * g.n_nodes
    assert joint.sum() == pytest.approx(1.0)


def test_invalid_cpts_rejected():
    g = Dag(2, frozenset({(0, 1)}))
    with pytest.raises(ValueError):
        BayesNet(g, 2, (np.array([[0.5, 0.5]]), np.array([[0.5, 0.5]])))
    with pytest.raises(ValueError):
        BayesNet(g, 2, (np.array([[0.7, 0.7]]), np.eye(2)))
    with pytest.raises(ValueError):
        random_cpts(g, 4, 0)


def test_fair_coin_frequency():
    coin = BayesNet(Dag(1, frozenset()), 2, (np.array([[0.5, 0.5]]),))
    data = forward_sample(coin, 10_000, seed=3)
    assert 0.47 <= np.mean(data.column(0) == 0) <= 0.53


@pytest.mark.parametrize("arity", [2, 3])
def test_copy_channel_information(arity):
    net = copy_net(arity)
    assert arc_mutual_information(net, (0, 1)).mi == pytest.approx(np.log2(arity))
    with pytest.raises(KeyError):
        arc_mutual_information(net, (1, 0))


def test_independent_pair_has_zero_information():
    assert mutual_information(np.full((3, 3), 1 / 9)) == pytest.approx(0.0, abs=1e-12)


def test_network_strength_aggregates():
    net = random_cpts(CHAIN, 2, 1)
    joint = joint_distribution(net)
    mis = [mutual_information(pair_marginal(joint, a, b)) for a, b in [(0, 1), (1, 2)]]
    assert network_strength(net) == pytest.approx(np.mean(mis))
    assert network_strength(net, "min") == pytest.approx(min(mis))
    with pytest.raises(ValueError):
        network_strength(random_cpts(Dag(2, frozenset()), 2, 0))


def test_sampling_matches_exact_joint():
    net = random_cpts(Dag(3, frozenset({(0, 1), (2, 1)})), 3, 11)
    data = forward_sample(net, 50_000, seed=5)
    tv = 0.5 * np.abs(empirical_joint(data) - joint_distribution(net)).sum()
    assert tv <= 0.05


def test_hidden_nodes_are_marginalized():
    g = Dag(3, frozenset({(2, 0), (2, 1)}))
    net = random_cpts(g, 2, 4)
    data = forward_sample(net, 40_000, seed=9, hidden=[2])
    assert data.n_vars == 2
    exact = joint_distribution(net).sum(axis=2)
    assert 0.5 * np.abs(empirical_joint(data) - exact).sum() <= 0.05


def test_sampling_is_seeded():
    net = random_cpts(CHAIN, 2, 0)
    a = forward_sample(net, 500, seed=1)
    b = forward_sample(net, 500, seed=1)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, forward_sample(net, 500, seed=2).values)


def test_csv_round_trip(tmp_path):
    data = forward_sample(random_cpts(CHAIN, 3, 0), 200, seed=0)
    data.provenance["level"] = "weak"
    path = tmp_path / "d.csv"
    data.to_csv(path)
    back = Dataset.from_csv(path)
    assert np.array_equal(back.values, data.values)
    assert back.names == data.names and back.arity == 3
    assert back.provenance["level"] == "weak"
    assert path.read_text().splitlines()[0] == ",".join(data.names)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.array([[0, 2]]), 2, ("A", "B"))


def test_net_text_round_trip():
    net = random_cpts(Dag(4, frozenset({(0, 2), (1, 2), (2, 3)})), 3, 2)
    back = parse_net(format_net(net, strength=0.5))
    assert back.structure.edges == net.structure.edges
    assert all(np.allclose(x, y) for x, y in zip(back.cpts, net.cpts))
