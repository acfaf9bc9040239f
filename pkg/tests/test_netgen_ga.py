import itertools

import numpy as np
import pytest

from trigger_lab.bayesnet import BayesNet, network_strength
from trigger_lab.graph import Dag
from trigger_lab.netgen_ga import GaConfig, StrengthObjective, evolve, evolve_with_history, three_level_suite

CHAIN = Dag(3, frozenset({(0, 1), (1, 2)}))
SMALL = GaConfig(population=30, generations=25, seed=1)


def deterministic_chain_optimum():
    """Best mean arc MI over a grid root and every deterministic child table."""
    best = 0.0
    tables = [np.eye(2)[list(rows)] for rows in itertools.product(range(2), repeat=2)]
    for p in np.linspace(0.05, 0.95, 19):
        for t1, t2 in itertools.product(tables, repeat=2):
            net = BayesNet(CHAIN, 2, (np.array([[p, 1 - p]]), t1, t2))
            best = max(best, network_strength(net))
    return best


def test_history_is_monotone():
    for kind in ("maximize", "minimize"):
        res = evolve_with_history(CHAIN, 2, StrengthObjective(kind), SMALL)
        assert len(res.history) == SMALL.generations
        assert all(b >= a for a, b in zip(res.history, res.history[1:]))


def test_maximize_binary_chain_reaches_optimum():
    res = evolve_with_history(CHAIN, 2, StrengthObjective("maximize"), GaConfig(population=40, generations=40))
    oracle = deterministic_chain_optimum()
    assert oracle == pytest.approx(1.0)
    assert 0.9 <= res.strength <= oracle + 1e-9


def test_minimize_drives_strength_down():
    res = evolve_with_history(CHAIN, 2, StrengthObjective("minimize"), SMALL)
    assert res.strength <= 0.05


def test_target_is_approached():
    res = evolve_with_history(CHAIN, 3, StrengthObjective("target", 0.3), SMALL)
    assert abs(res.strength - 0.3) <= 0.1


def test_evolve_is_pure():
    a = evolve(CHAIN, 2, StrengthObjective("maximize"), SMALL)
    b = evolve(CHAIN, 2, StrengthObjective("maximize"), SMALL)
    assert all(np.array_equal(x, y) for x, y in zip(a.cpts, b.cpts))


def test_suite_ordering():
    g = Dag(4, frozenset({(0, 1), (2, 1), (1, 3)}))
    suite = three_level_suite(g, 2, seed=5, cfg=GaConfig(population=30, generations=20))
    assert suite.strong.strength >= suite.medium.strength >= suite.weak.strength


def test_config_validation():
    with pytest.raises(ValueError):
        GaConfig(population=1)
    with pytest.raises(ValueError):
        GaConfig(mutation_rate=1.5)
    with pytest.raises(ValueError):
        StrengthObjective("target")
    with pytest.raises(ValueError):
        evolve(Dag(2, frozenset()), 2, StrengthObjective("maximize"), SMALL)
