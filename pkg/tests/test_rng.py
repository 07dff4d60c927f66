import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isestimate.errors import InvalidInputError
from isestimate.oracle import InstrumentedOracle
from isestimate.rng import bernoulli_batch, keyed_rng, sample_bernoulli_subset, substream

from conftest import random_graph


def test_keyed_streams_are_reproducible_and_distinct():
    a = keyed_rng(3, 1, 2).random(4)
    assert np.array_equal(a, keyed_rng(3, 1, 2).random(4))
    assert not np.array_equal(a, keyed_rng(3, 2, 1).random(4))
    assert not np.array_equal(substream(3, "x").random(4), substream(3, "y").random(4))


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_probability_range(p):
    with pytest.raises(InvalidInputError):
        sample_bernoulli_subset(range(5), p, np.random.default_rng(0))


def test_subset_edge_probabilities():
    rng = np.random.default_rng(0)
    assert sample_bernoulli_subset(range(10), 0.0, rng).size == 0
    assert sample_bernoulli_subset([3, 1, 2], 1.0, rng).tolist() == [1, 2, 3]


def test_subset_marginals():
    rng = np.random.default_rng(1)
    hits = np.zeros(20)
    trials = 20_000
    for _ in range(trials):
        hits[sample_bernoulli_subset(range(20), 0.3, rng)] += 1
    # every coordinate within 5 standard deviations
    assert np.all(np.abs(hits / trials - 0.3) < 5 * math.sqrt(0.21 / trials))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 300), st.integers(1, 60), st.sampled_from([0.001, 0.05, 0.2, 0.3, 0.9, 1.0]), st.integers(0, 99), st.booleans())
def test_batch_shape(n_rows, size, p, seed, use_skip):
    skip = seed % size if use_skip else None
    rows, cols = bernoulli_batch(np.random.default_rng(seed), n_rows, size, p, skip=skip)
    assert rows.size == cols.size
    assert np.all(np.diff(rows) >= 0)
    if rows.size:
        assert rows.max() < n_rows and cols.min() >= 0 and cols.max() < size
        keys = rows * size + cols
        assert np.all(np.diff(keys) > 0)
    if skip is not None:
        assert not np.any(cols == skip)
    if p == 1.0:
        assert rows.size == n_rows * (size - (skip is not None))


@pytest.mark.parametrize("p", [0.01, 0.4])
def test_batch_mean(p):
    rows, cols = bernoulli_batch(np.random.default_rng(2), 5000, 100, p, skip=7)
    mean = 5000 * 99 * p
    assert abs(rows.size - mean) < 5 * math.sqrt(mean)


def test_random_subset_independence_bound():
    # a p-sample of S is independent with probability at least 1 - |E(S)| p^2
    g = random_graph(60, 0.05, 4)
    o = InstrumentedOracle(g)
    S = np.arange(60)
    r = g.m
    p = math.sqrt(0.4 / r)
    rng = np.random.default_rng(5)
    draws = 4000
    ok = sum(o.is_independent(sample_bernoulli_subset(S, p, rng)) for _ in range(draws))
    assert ok / draws >= 1 - r * p * p - 0.04

