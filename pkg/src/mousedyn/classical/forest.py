"""Random forest of axis-aligned Gini decision trees.

Defaults follow the tuned hyperparameters used for this task: 1600 trees,
max depth 30, min_samples_split 2, min_samples_leaf 1, ceil(sqrt(d))
candidate features per split, and no bootstrap, so every tree sees the full
training set and randomness enters only through per-split feature sampling.
Each tree's RNG is seeded by (seed, tree index), which makes the fitted
forest identical for any worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 1600
    max_depth: int = 30
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    bootstrap: bool = False

    def n_candidate_features(self, n_features: int) -> int:
        return min(n_features, math.ceil(math.sqrt(n_features)))


@dataclass(frozen=True)
class ForestModel:
    """Trees as nested dicts: split nodes {"f", "t", "l", "r"}, leaves
    {"p": positive fraction, "n": training rows}."""

    trees: tuple[dict, ...]
    config: ForestConfig
    seed: int


def _gini(n_pos: np.ndarray | float, n: np.ndarray | float):
    p = n_pos / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split(x: np.ndarray, y: np.ndarray, candidates: np.ndarray, min_leaf: int):
    """Best (feature, threshold) among the candidate features by Gini decrease.

    Thresholds are midpoints between consecutive distinct sorted values.
    Candidates are scanned in their sampled order and replaced only on a
    strictly larger decrease, so the search is deterministic.
    Returns None when no split improves on the parent node.
    """
    n = len(y)
    n_pos_total = float(np.sum(y))
    parent = _gini(n_pos_total, n)
    best = None
    best_decrease = 0.0
    for f in candidates:
        v = x[:, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        ys = y[order]
        boundaries = np.nonzero(vs[:-1] < vs[1:])[0]
        if len(boundaries) == 0:
            continue
        n_left = boundaries + 1
        n_right = n - n_left
        ok = (n_left >= min_leaf) & (n_right >= min_leaf)
        if not np.any(ok):
            continue
        boundaries, n_left, n_right = boundaries[ok], n_left[ok], n_right[ok]
        pos_left = np.cumsum(ys)[boundaries]
        pos_right = n_pos_total - pos_left
        weighted = (n_left * _gini(pos_left, n_left) + n_right * _gini(pos_right, n_right)) / n
        i = int(np.argmin(weighted))
        decrease = parent - weighted[i]
        if decrease > best_decrease:
            b = boundaries[i]
            best = (int(f), float((vs[b] + vs[b + 1]) / 2.0))
            best_decrease = decrease
    return best


def _grow(x: np.ndarray, y: np.ndarray, rng: np.random.Generator,
          config: ForestConfig, depth: int) -> dict:
    n = len(y)
    n_pos = int(np.sum(y))
    if (
        depth >= config.max_depth
        or n < config.min_samples_split
        or n_pos == 0
        or n_pos == n
    ):
        return {"p": n_pos / n, "n": n}
    k = config.n_candidate_features(x.shape[1])
    candidates = rng.choice(x.shape[1], size=k, replace=False)
    split = _best_split(x, y, candidates, config.min_samples_leaf)
    if split is None:
        return {"p": n_pos / n, "n": n}
    f, t = split
    mask = x[:, f] <= t
    return {
        "f": f,
        "t": t,
        "l": _grow(x[mask], y[mask], rng, config, depth + 1),
        "r": _grow(x[~mask], y[~mask], rng, config, depth + 1),
    }


def _fit_tree(x: np.ndarray, y: np.ndarray, config: ForestConfig, seed: int, index: int) -> dict:
    rng = np.random.default_rng([seed, index])
    if config.bootstrap:
        pick = rng.choice(len(y), size=len(y), replace=True)
        x, y = x[pick], y[pick]
    return _grow(x, y, rng, config, depth=0)


def rf_fit(rows: np.ndarray, labels: np.ndarray, config: ForestConfig | None = None,
           seed: int = 0, n_jobs: int = 1) -> ForestModel:
    """Fit the forest; deterministic for any ``n_jobs``."""
    x = np.asarray(rows, dtype=float)
    y = (np.asarray(labels, dtype=int) == 1).astype(float)
    if x.ndim != 2 or len(x) < 2:
        raise DataError("need a 2-D matrix with at least 2 rows")
    if y.min() == y.max():
        raise DataError("training data contains a single class")
    config = config or ForestConfig()
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(
                lambda i: _fit_tree(x, y, config, seed, i), range(config.n_trees)
            ))
    else:
        trees = [_fit_tree(x, y, config, seed, i) for i in range(config.n_trees)]
    return ForestModel(trees=tuple(trees), config=config, seed=seed)


def _tree_scores(tree: dict, x: np.ndarray, idx: np.ndarray, out: np.ndarray):
    if "p" in tree:
        out[idx] = tree["p"]
        return
    mask = x[idx, tree["f"]] <= tree["t"]
    _tree_scores(tree["l"], x, idx[mask], out)
    _tree_scores(tree["r"], x, idx[~mask], out)


def rf_predict_proba(model: ForestModel, queries: np.ndarray) -> np.ndarray:
    """Mean over trees of the leaf positive-class fraction, per query row."""
    x = np.atleast_2d(np.asarray(queries, dtype=float))
    scores = np.zeros(len(x))
    buf = np.empty(len(x))
    idx = np.arange(len(x))
    for tree in model.trees:
        _tree_scores(tree, x, idx, buf)
        scores += buf
    return scores / len(model.trees)
