"""Dataset assembly: balanced per-user binary datasets, the all-users
multi-class dataset, and deterministic stratified train/test splits.

Binary protocol: all n samples of the target user are the positive class and
exactly n imposter samples the negative class, floor(n/(k-1)) drawn without
replacement from each non-target user plus a pooled top-up of the remainder
taking at most one extra sample per imposter, so the classes balance exactly
and per-imposter contributions differ by at most one. All sampling is seeded
per (seed, target, user), so worker count and map ordering never change the
result.
"""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, DataError

POSITIVE, NEGATIVE = 1, 0


@dataclass(frozen=True)
class LabeledDataset:
    """Sample rows, integer labels, and per-row (subject, action_index) provenance.

    ``rows`` holds one representation: feature vectors (n, 33), speed signals
    (n, block_len, 2), or coordinate vectors (n, 2*block_len).
    """

    rows: np.ndarray
    labels: np.ndarray
    provenance: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not (len(self.rows) == len(self.labels) == len(self.provenance)):
            raise ValueError("rows, labels and provenance must have equal length")

    def __len__(self) -> int:
        return len(self.labels)

    def take(self, indices: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            rows=self.rows[indices],
            labels=self.labels[indices],
            provenance=tuple(self.provenance[i] for i in indices),
        )


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def build_binary_dataset(
    target: int,
    actions_by_user: Mapping[int, np.ndarray],
    seed: int,
) -> LabeledDataset:
    """Balanced binary dataset for one target user.

    With n target samples and k users, floor(n/(k-1)) imposter samples come
    from each non-target user; the remainder r = n - (k-1)*floor(n/(k-1)) is
    topped up uniformly without replacement from the pooled leftover imposter
    samples, at most one per imposter. Raises :class:`DataError` naming any
    user short of its share.
    """
    if target not in actions_by_user:
        raise DataError(f"target user {target} not present")
    users = sorted(actions_by_user)
    if len(users) < 2:
        raise DataError("need at least 2 users to build a binary dataset")

    pos_rows = np.asarray(actions_by_user[target])
    n = len(pos_rows)
    if n < 1:
        raise DataError(f"target user {target} has no samples")
    imposters = [u for u in users if u != target]
    per_user = n // len(imposters)

    neg_rows, neg_prov = [], []
    leftover_by_user: dict[int, np.ndarray] = {}
    for u in imposters:
        rows = np.asarray(actions_by_user[u])
        if len(rows) < per_user:
            raise DataError(
                f"user {u} has {len(rows)} samples, needs {per_user} for the imposter share"
            )
        rng = np.random.default_rng([seed, target, 0, u])
        chosen = rng.choice(len(rows), size=per_user, replace=False)
        chosen = np.sort(chosen)
        neg_rows.append(rows[chosen])
        neg_prov.extend((u, int(i)) for i in chosen)
        mask = np.ones(len(rows), dtype=bool)
        mask[chosen] = False
        leftover_by_user[u] = np.nonzero(mask)[0]

    r = n - per_user * len(imposters)
    if r > 0:
        pool = [(u, int(i)) for u in imposters for i in leftover_by_user[u]]
        rng = np.random.default_rng([seed, target, 1])
        # walk the shuffled pool taking each imposter at most once, so
        # contributions never differ by more than one
        picked: list[tuple[int, int]] = []
        seen: set[int] = set()
        for p in rng.permutation(len(pool)):
            u, i = pool[p]
            if u in seen:
                continue
            seen.add(u)
            picked.append((u, i))
            if len(picked) == r:
                break
        if len(picked) < r:
            raise DataError(
                f"only {len(picked)} imposters have leftover samples, need {r} top-ups"
            )
        for u, i in sorted(picked):
            neg_rows.append(np.asarray(actions_by_user[u])[i:i + 1])
            neg_prov.append((u, i))

    rows = np.concatenate([pos_rows] + neg_rows, axis=0)
    labels = np.concatenate([
        np.full(n, POSITIVE, dtype=int),
        np.full(len(neg_prov), NEGATIVE, dtype=int),
    ])
    provenance = tuple((target, i) for i in range(n)) + tuple(neg_prov)
    return LabeledDataset(rows=rows, labels=labels, provenance=provenance)


def build_multiclass_dataset(actions_by_user: Mapping[int, np.ndarray]) -> LabeledDataset:
    """Every action of every user, labelled by subject id; no sampling."""
    users = sorted(actions_by_user)
    if len(users) < 2:
        raise DataError("need at least 2 users for a multi-class dataset")
    rows = np.concatenate([np.asarray(actions_by_user[u]) for u in users], axis=0)
    labels = np.concatenate([
        np.full(len(actions_by_user[u]), u, dtype=int) for u in users
    ])
    provenance = tuple(
        (u, i) for u in users for i in range(len(actions_by_user[u]))
    )
    return LabeledDataset(rows=rows, labels=labels, provenance=provenance)


def split_indices(labels: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (train, test) index partition.

    Depends only on the label sequence and the spec, so datasets holding
    different representations of the same actions split identically.
    Stratified mode permutes within each class and preserves class ratios to
    within one row; both partitions keep at least one row per class.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if n < 2:
        raise DataError("need at least 2 rows to split")
    if not spec.stratified:
        perm = np.random.default_rng(spec.seed).permutation(n)
        cut = int(round(spec.train_fraction * n))
        cut = min(max(cut, 1), n - 1)
        return np.sort(perm[:cut]), np.sort(perm[cut:])

    train_parts, test_parts = [], []
    for label in np.unique(labels):
        idx = np.nonzero(labels == label)[0]
        if len(idx) < 2:
            raise DataError(f"class {label} has {len(idx)} row(s); stratified split needs >= 2")
        perm = np.random.default_rng([spec.seed, int(label)]).permutation(len(idx))
        cut = int(round(spec.train_fraction * len(idx)))
        cut = min(max(cut, 1), len(idx) - 1)
        train_parts.append(idx[perm[:cut]])
        test_parts.append(idx[perm[cut:]])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def train_test_split(ds: LabeledDataset, spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    """Split a dataset into disjoint, exhaustive train and test partitions."""
    train_idx, test_idx = split_indices(ds.labels, spec)
    return ds.take(train_idx), ds.take(test_idx)
