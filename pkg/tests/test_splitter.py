import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from faircart import Dataset, FairnessReport, best_split, gini, information_gain, penalized_gain
from faircart.splitter import NodeView, candidates, node_parity_after_split

from conftest import random_dataset
from oracles import brute_force_split


def node_of(x, y, s=None):
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    s = np.zeros(len(y), dtype=int) if s is None else s
    return NodeView.root(Dataset(x, ("x",), s, y))


def report(phi, significant=True):
    return FairnessReport(delta=phi, ci_lower=phi, ci_upper=phi, phi=phi, significant=significant,
                          n_priv=10, n_unpriv=10, p_priv=phi, p_unpriv=0.0, alpha=0.05)


@pytest.mark.parametrize("p,expected", [(0.0, 0.0), (0.5, 0.5), (0.25, 0.375), (1.0, 0.0)])
def test_gini_examples(p, expected):
    assert gini(p) == pytest.approx(expected)


@pytest.mark.parametrize("p", [-0.1, 1.01])
def test_gini_out_of_range(p):
    with pytest.raises(ValueError):
        gini(p)


def test_information_gain_examples():
    assert information_gain(node_of([1, 2, 3, 4], [0, 0, 1, 1]), 0, 2.5) == pytest.approx(0.5)
    assert information_gain(node_of([1, 2, 3, 4], [0, 1, 0, 1]), 0, 2.5) == pytest.approx(0.0, abs=1e-15)
    node = node_of([1, 2, 3, 4, 5], [0, 0, 1, 1, 0])
    assert information_gain(node, 0, 2.5) == pytest.approx(0.48 - 0.6 * 4 / 9, rel=1e-14)


def test_information_gain_degenerate():
    with pytest.raises(ValueError):
        information_gain(node_of([1, 2, 3], [0, 1, 0]), 0, 10.0)


def test_parity_constant_predictions():
    node = node_of([1, 2, 3, 4, 5, 6], [0, 0, 0, 0, 1, 0], s=np.array([0, 1, 0, 1, 0, 1]))
    r = node_parity_after_split(node, 0, 3.5)
    assert r.delta == 0 and not r.significant


def test_parity_perfect_separation():
    s = np.repeat([1, 0], 100)
    x = s.astype(float)
    node = NodeView.root(Dataset(x[:, None], ("x",), s, s.copy()))
    r = node_parity_after_split(node, 0, 0.5)
    assert r.delta == 1.0 and (r.ci_lower, r.ci_upper) == (1.0, 1.0) and r.phi == 1.0
    assert r.significant


def test_parity_single_group_undefined():
    r = node_parity_after_split(node_of([1, 2, 3, 4], [0, 0, 1, 1]), 0, 2.5)
    assert not r.defined and r.phi == 0.0 and not r.significant


def test_penalized_gain_examples():
    inside = FairnessReport(0.095, -0.01, 0.20, 0.0, False, 10, 10, 0.5, 0.4, 0.05)
    assert penalized_gain(0.3, inside, 0.1) == 0.3
    assert penalized_gain(0.3, report(1.0), 0.7) == 0.0
    assert penalized_gain(0.3, report(0.0642), 0.1) == pytest.approx(0.028074, rel=1e-12)


def test_penalized_gain_errors():
    with pytest.raises(ValueError):
        penalized_gain(0.3, report(0.1), 1.5)
    with pytest.raises(ValueError):
        penalized_gain(-0.1, report(0.1), 0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_penalty_monotone(ig, phi, lam_a, lam_b):
    lo, hi = sorted((lam_a, lam_b))
    r = report(phi)
    assert penalized_gain(ig, r, lo) <= penalized_gain(ig, r, hi)
    if ig > 1e-9 and phi < 1 - 1e-9 and hi - lo > 1e-9:
        assert penalized_gain(ig, r, lo) < penalized_gain(ig, r, hi)
    p1, p2 = sorted((lam_a, lam_b))
    assert penalized_gain(ig, report(p2), 0.5) <= penalized_gain(ig, report(p1), 0.5)


def test_best_split_single_crossing():
    node = node_of([1, 2, 3, 4, 5, 6], [0, 0, 0, 1, 1, 1])
    split = best_split(node, 1.0, min_leaf=1)
    assert split.threshold == 3.5 and split.ig == pytest.approx(0.5)


def test_best_split_pure_node():
    assert best_split(node_of(range(20), [1] * 20), 0.5) is None


def test_best_split_too_small():
    assert best_split(node_of(range(9), [0, 1] * 4 + [0]), 0.5, min_leaf=5) is None


@pytest.mark.parametrize("seed", range(15))
def test_best_split_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    data = random_dataset(rng, 50, levels=2 if seed % 2 else None)
    node = NodeView.root(data)
    lam = [0.0, 0.1, 0.5, 1.0][seed % 4]
    got = best_split(node, lam, min_leaf=3)
    _, want = brute_force_split(node, lam, 0.05, 3)
    if want is None:
        assert got is None
    else:
        assert (got.feature_index, got.threshold) == (want[1], want[2])
        assert got.ig_fair == pytest.approx(want[0], abs=1e-12)


def test_candidate_invariants(rng):
    for _ in range(10):
        data = random_dataset(rng, 120, levels=3)
        node = NodeView.root(data)
        table = candidates(node, float(rng.random()), min_leaf=2)
        bound = gini(node.p1v)
        assert np.all(table.ig_fair >= 0)
        assert np.all(table.ig_fair <= table.ig + 1e-15)
        assert np.all(table.ig <= bound + 1e-12)
        assert bound <= 0.5


def test_feature_order_independence(rng):
    data = random_dataset(rng, 150, p=4)
    perm = np.array([2, 0, 3, 1])
    shuffled = Dataset(data.features[:, perm], tuple(data.feature_names[i] for i in perm),
                       data.sensitive, data.target)
    a = best_split(NodeView.root(data), 0.3)
    b = best_split(NodeView.root(shuffled), 0.3)
    assert a.ig_fair == b.ig_fair
    assert perm[b.feature_index] == a.feature_index and a.threshold == b.threshold


def test_single_group_equals_plain_cart(rng):
    for _ in range(5):
        data = random_dataset(rng, 100, constant_s=True)
        node = NodeView.root(data)
        a = best_split(node, 0.0)
        b = best_split(node, 0.0, fairness_enabled=False)
        assert (a.feature_index, a.threshold, a.ig_fair) == (b.feature_index, b.threshold, b.ig)
