import numpy as np
import pytest

from helpers import random_model, word_vocab
from oracles import literal_count_oracle, rank_oracle
from tmprune.machine import ModelConfig, TsetlinMachine
from tmprune.pruning import DEFAULT_SWEEP, literal_frequencies, prune, prune_sweep, rank_literals


def model_with_counts(counts, num_clauses=12):
    """Literal ``j`` included in the first ``counts[j]`` clauses."""
    n2 = len(counts)
    states = np.full((num_clauses, n2), 100)
    for j, c in enumerate(counts):
        states[:c, j] = 200
    return TsetlinMachine(ModelConfig(2, num_clauses // 2), n2 // 2, states=states)


def test_fresh_model_has_no_includes():
    m = TsetlinMachine(ModelConfig(2, 4), 6)
    assert literal_frequencies(m).tolist() == [0] * 12
    assert rank_literals(literal_frequencies(m)).tolist() == []


def test_hand_counted():
    states = np.full((4, 4), 50)
    states[[0, 1, 3], 2] = 180
    m = TsetlinMachine(ModelConfig(2, 2), 2, states=states)
    assert literal_frequencies(m).tolist() == [0, 0, 3, 0]


def test_frequencies_match_naive_counter(rng):
    for _ in range(50):
        m = random_model(rng, num_classes=3, alpha=4, n=10, p_include=0.3)
        table = literal_frequencies(m)
        assert table.tolist() == literal_count_oracle(m.states.tolist(), 128)
        assert table.sum() == m.include_mask().sum()
        assert table.max() <= m.config.num_clauses


def test_rank_examples():
    assert rank_literals([5, 1, 3]).tolist() == [1, 2, 0]
    assert rank_literals([2, 2]).tolist() == [0, 1]
    assert rank_literals([0, 4, 0, 1]).tolist() == [3, 1]


def test_rank_matches_reference_sort(rng):
    for _ in range(200):
        counts = rng.integers(0, 6, rng.integers(1, 40))
        assert rank_literals(counts).tolist() == rank_oracle(counts.tolist())


def test_prune_zero_is_identity(rng):
    m = random_model(rng)
    pruned, report = prune(m, 0.0)
    assert np.array_equal(pruned.states, m.states)
    assert report.pruned == []


def test_prune_quarter_of_four():
    m = model_with_counts([1, 4, 4, 9, 0, 0])
    pruned, report = prune(m, 0.25)
    assert report.ranked == 4
    assert report.pruned == [0]
    assert pruned.states[:, 0].tolist() == [0] * 12
    assert np.array_equal(pruned.states[:, 1:], m.states[:, 1:])


def test_prune_leaves_input_unmodified(rng):
    m = random_model(rng, p_include=0.4)
    before = m.states.copy()
    prune(m, 0.5)
    assert np.array_equal(m.states, before)


def test_pruned_literals_recount_to_zero(rng):
    for _ in range(30):
        m = random_model(rng, alpha=6, n=12, p_include=0.3)
        pruned, report = prune(m, float(rng.uniform(0, 0.5)))
        counts = literal_count_oracle(pruned.states.tolist(), 128)
        assert all(counts[j] == 0 for j in report.pruned)


def test_fraction_range():
    m = TsetlinMachine(ModelConfig(2, 2), 2)
    for bad in (-0.01, 0.51, 1.0):
        with pytest.raises(ValueError):
            prune(m, bad)
    with pytest.raises(ValueError):
        prune_sweep(m, [0.1, 0.6])


def test_floor_of_fraction_is_robust_to_rounding():
    m = model_with_counts([1] * 100, num_clauses=4)
    assert len(prune(m, 0.29)[1].pruned) == 29


def test_sweep_is_independent_and_nested(rng):
    m = random_model(rng, alpha=8, n=20, p_include=0.2)
    (f1, m1, r1), (f2, m2, r2) = prune_sweep(m, [0.05, 0.40])
    assert set(r1.pruned) <= set(r2.pruned)
    assert r1.ranked == r2.ranked
    [(f0, m0, r0)] = prune_sweep(m, [0.0])
    assert np.array_equal(m0.states, m.states)


def test_report_reduction():
    states = np.full((4, 8), 100)
    states[0, [0, 2, 4, 6]] = 200
    states[1, [0]] = 200
    m = TsetlinMachine(ModelConfig(2, 2), 4, states=states)
    _, report = prune(m, 0.5, word_vocab(4))
    # counts: literal 0 -> 2, literals 2, 4, 6 -> 1; two of four ranked go.
    assert report.pruned == [2, 4]
    assert report.names == ["w1", "w2"]
    assert report.literals_before[:2] == [4, 1]
    assert report.literals_after[:2] == [2, 1]
    assert report.reduction[:2] == [50.0, 0.0]
    assert report.to_dict()["percent_reduction"][0] == 50.0


def test_synthetic_sweep_monotone(trained):
    totals = [literal_frequencies(p).sum() for _, p, _ in prune_sweep(trained.model, DEFAULT_SWEEP)]
    assert all(a >= b for a, b in zip(totals, totals[1:]))
    assert totals[0] <= literal_frequencies(trained.model).sum()
