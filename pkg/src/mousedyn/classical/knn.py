"""K-nearest-neighbors over scaled feature vectors (default K = 13)."""

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, ModelError

DEFAULT_K = 13


@dataclass(frozen=True)
class KnnModel:
    rows: np.ndarray
    labels: np.ndarray
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= len(self.rows):
            raise ModelError(f"K must be in [1, {len(self.rows)}], got {self.k}")


def knn_fit(rows: np.ndarray, labels: np.ndarray, k: int = DEFAULT_K) -> KnnModel:
    rows = np.asarray(rows, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(rows) != len(labels) or len(rows) < 1:
        raise DataError("rows and labels must be non-empty and equal length")
    return KnnModel(rows=rows, labels=labels, k=k)


def knn_score(model: KnnModel, query: np.ndarray) -> float:
    """Fraction of the K nearest neighbors voting positive.

    Neighbors by Euclidean distance; distance ties break toward the lower
    training-row index (stable sort).
    """
    query = np.asarray(query, dtype=float)
    if query.shape != model.rows.shape[1:]:
        raise DataError(f"query shape {query.shape} != training shape {model.rows.shape[1:]}")
    d2 = np.sum((model.rows - query) ** 2, axis=1)
    nearest = np.argsort(d2, kind="stable")[:model.k]
    return float(np.sum(model.labels[nearest] == 1)) / model.k


def knn_score_batch(model: KnnModel, queries: np.ndarray) -> np.ndarray:
    """Row-wise :func:`knn_score`, bit-identical to the single-query path.

    Distances use the same subtract-then-square arithmetic so engineered
    ties resolve the same way; queries are chunked to bound memory.
    """
    q = np.asarray(queries, dtype=float)
    if q.ndim != 2 or q.shape[1:] != model.rows.shape[1:]:
        raise DataError(f"queries shape {q.shape} != (n, {model.rows.shape[1]})")
    out = np.empty(len(q))
    for start in range(0, len(q), 128):
        block = q[start:start + 128]
        d2 = np.sum((model.rows[None, :, :] - block[:, None, :]) ** 2, axis=2)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :model.k]
        out[start:start + 128] = np.sum(model.labels[nearest] == 1, axis=1) / model.k
    return out


def knn_predict(model: KnnModel, query: np.ndarray) -> tuple[int, float]:
    """(label, positive-vote fraction); even-vote ties resolve negative."""
    score = knn_score(model, query)
    return (1 if score > 0.5 else 0), score
