"""K-nearest-neighbors scoring, tie handling, and the batch path."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mousedyn.classical.knn import (
    DEFAULT_K,
    KnnModel,
    knn_fit,
    knn_predict,
    knn_score,
    knn_score_batch,
)
from mousedyn.errors import DataError, ModelError


def grid_model(k=3):
    rows = np.array([[0.0], [1.0], [2.0], [3.0], [4.0]])
    labels = np.array([1, 1, 0, 0, 1])
    return knn_fit(rows, labels, k=k)


def test_single_neighbor_returns_its_label():
    model = grid_model(k=1)
    assert knn_score(model, [0.1]) == 1.0
    assert knn_score(model, [2.2]) == 0.0


def test_vote_fraction():
    model = grid_model(k=3)
    # neighbors of 0.9: rows 1, 0, 2 -> labels 1, 1, 0
    assert knn_score(model, [0.9]) == pytest.approx(2.0 / 3.0)


def test_distance_ties_break_to_lower_row_index():
    rows = np.array([[0.0], [2.0]])
    labels = np.array([1, 0])
    model = knn_fit(rows, labels, k=1)
    # query exactly between both rows: stable sort keeps row 0 first
    assert knn_score(model, [1.0]) == 1.0
    flipped = knn_fit(rows, labels[::-1].copy(), k=1)
    assert knn_score(flipped, [1.0]) == 0.0


def test_predict_threshold_and_even_tie():
    rows = np.array([[0.0], [0.2], [1.0], [1.2]])
    labels = np.array([1, 1, 0, 0])
    model = knn_fit(rows, labels, k=2)
    assert knn_predict(model, [0.1]) == (1, 1.0)
    # one vote each: score 0.5 is not > 0.5, resolves negative
    mixed = knn_fit(np.array([[0.0], [1.0]]), np.array([1, 0]), k=2)
    label, score = knn_predict(mixed, [0.5])
    assert (label, score) == (0, 0.5)


def test_default_k_is_13():
    assert DEFAULT_K == 13


def test_validation():
    rows = np.zeros((5, 2))
    labels = np.array([1, 0, 1, 0, 1])
    with pytest.raises(ModelError):
        knn_fit(rows, labels, k=0)
    with pytest.raises(ModelError):
        knn_fit(rows, labels, k=6)
    with pytest.raises(DataError):
        knn_fit(rows, labels[:3])
    model = knn_fit(rows, labels, k=3)
    with pytest.raises(DataError):
        knn_score(model, np.zeros(3))
    with pytest.raises(DataError):
        knn_score_batch(model, np.zeros((4, 3)))


def exhaustive_oracle(model: KnnModel, query: np.ndarray) -> float:
    """Sort by (distance, training index) explicitly, then vote."""
    d2 = np.sum((model.rows - query) ** 2, axis=1)
    order = sorted(range(len(d2)), key=lambda i: (d2[i], i))
    votes = [model.labels[i] == 1 for i in order[:model.k]]
    return sum(votes) / model.k


def test_score_matches_exhaustive_oracle_with_engineered_ties():
    rng = np.random.default_rng(17)
    # integer grid coordinates force many exactly-equal distances
    rows = rng.integers(0, 3, size=(60, 4)).astype(float)
    labels = rng.integers(0, 2, size=60)
    queries = rng.integers(0, 3, size=(40, 4)).astype(float)
    for k in (1, 3, 13):
        model = knn_fit(rows, labels, k=k)
        for q in queries:
            assert knn_score(model, q) == exhaustive_oracle(model, q)


def test_batch_path_is_bit_identical_to_single_queries():
    rng = np.random.default_rng(23)
    rows = np.round(rng.normal(size=(50, 6)), 1)  # rounding engineers ties
    labels = rng.integers(0, 2, size=50)
    model = knn_fit(rows, labels, k=5)
    queries = np.round(rng.normal(size=(300, 6)), 1)  # crosses the chunk size
    batch = knn_score_batch(model, queries)
    single = np.array([knn_score(model, q) for q in queries])
    assert np.array_equal(batch, single)


@given(st.integers(min_value=0, max_value=2**31 - 1),
       st.integers(min_value=1, max_value=13))
@settings(max_examples=30, deadline=None)
def test_score_stays_in_unit_interval(seed, k):
    rng = np.random.default_rng(seed)
    n = max(k, int(rng.integers(k, 40)))
    model = knn_fit(rng.normal(size=(n, 3)), rng.integers(0, 2, n), k=k)
    score = knn_score(model, rng.normal(size=3))
    assert 0.0 <= score <= 1.0
    assert score * k == pytest.approx(round(score * k))  # multiple of 1/k
