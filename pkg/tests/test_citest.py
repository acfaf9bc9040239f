import numpy as np
import pytest
from scipy.stats import chi2_contingency

from trigger_lab.bayesnet import BayesNet, Dataset, forward_sample, make_rng, random_cpts
from trigger_lab.citest import PValueCache, ci_test, empirical_pattern, g2_statistic
from trigger_lab.graph import Dag
from trigger_lab.pattern import graph_pattern


def coins(n, k, seed, arity=2):
    return Dataset(make_rng(seed).integers(0, arity, size=(n, k)), arity)


def test_unconditional_statistic_matches_scipy():
    data = forward_sample(random_cpts(Dag(2, frozenset({(0, 1)})), 3, 2), 400, seed=1)
    table = np.zeros((3, 3))
    np.add.at(table, (data.column(0), data.column(1)), 1)
    stat, p, dof, _ = chi2_contingency(table, correction=False, lambda_="log-likelihood")
    res = ci_test(data, 0, 1)
    assert res.statistic == pytest.approx(stat)
    assert res.dof == dof
    assert res.p_value == pytest.approx(p)


def test_conditional_statistic_is_sum_over_strata():
    data = coins(600, 3, 4, arity=3)
    total, dof = g2_statistic(data, 0, 1, [2])
    parts = []
    for v in range(3):
        rows = data.values[data.column(2) == v]
        parts.append(g2_statistic(Dataset(rows, 3), 0, 1)[0])
    assert total == pytest.approx(sum(parts))
    assert dof == 3 * 4


def test_symmetry():
    data = coins(300, 3, 0)
    assert ci_test(data, 0, 1, [2]).p_value == pytest.approx(ci_test(data, 1, 0, [2]).p_value)


def test_constant_column_is_independent():
    vals = coins(200, 2, 1).values
    vals[:, 0] = 0
    res = ci_test(Dataset(vals, 2), 0, 1)
    assert res.dof == 0 and res.p_value == 1.0 and not res.dependent


def test_copied_column_is_dependent():
    vals = coins(500, 2, 2).values
    vals[:, 1] = vals[:, 0]
    assert ci_test(Dataset(vals, 2), 0, 1).dependent


def test_category_relabeling_invariant():
    data = coins(400, 3, 3, arity=3)
    swapped = data.values.copy()
    swapped[:, 0] = (swapped[:, 0] + 1) % 3
    a = ci_test(data, 0, 1, [2])
    b = ci_test(Dataset(swapped, 3), 0, 1, [2])
    assert a.statistic == pytest.approx(b.statistic)


def test_false_rejection_rate_near_alpha():
    rejections = sum(ci_test(coins(500, 2, s), 0, 1, alpha=0.05).dependent for s in range(400))
    assert 0.02 <= rejections / 400 <= 0.08


def test_argument_checks():
    data = coins(10, 3, 0)
    with pytest.raises(ValueError):
        ci_test(data, 0, 0)
    with pytest.raises(ValueError):
        ci_test(data, 0, 1, [1])
    with pytest.raises(ValueError):
        ci_test(data, 0, 1, alpha=0.0)


def test_cache_agrees_with_direct_tests():
    data = coins(300, 4, 5)
    cache = PValueCache(data)
    assert cache.p_value(2, 0, [3, 1]) == pytest.approx(ci_test(data, 0, 2, [1, 3]).p_value)
    assert cache.independent(0, 1, [], 1e-9)


def test_empirical_pattern_recovers_chain():
    g = Dag(3, frozenset({(0, 1), (1, 2)}))
    strong = np.array([[0.9, 0.1], [0.1, 0.9]])
    net = BayesNet(g, 2, (np.array([[0.5, 0.5]]), strong, strong))
    hits = sum(empirical_pattern(forward_sample(net, 2000, seed=s), 0.05) == graph_pattern(g) for s in range(20))
    assert hits >= 15


def test_empirical_pattern_of_noise_is_mostly_empty():
    empty = sum(not any(empirical_pattern(coins(1000, 3, s), 0.05).bits) for s in range(30))
    assert empty >= 20


def test_two_variable_pattern_has_one_cell():
    assert len(empirical_pattern(coins(100, 2, 0), 0.05).bits) == 1
