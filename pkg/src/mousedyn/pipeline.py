"""End-to-end glue: sessions -> actions -> representations -> models.

Three per-action representations feed the model families:

- "features": the 33 kinematic statistics (KNN, random forest, SVM), min-max
  scaled with parameters fitted on the training partition only;
- "speed": the (block_len, 2) per-event velocity signal (1D-CNN);
- "coords": the flattened raw coordinates, length 2 * block_len (ANN).

Every fit derives its RNG stream from (run seed, stable unit id), so results
do not depend on evaluation order or worker count.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .actions import DEFAULT_BLOCK_LEN, MouseAction, compute_kinematics, segment
from .classical.forest import ForestConfig, rf_fit, rf_predict_proba
from .classical.knn import knn_fit, knn_score_batch
from .classical.svm import svm_fit, svm_score
from .datasets import (
    LabeledDataset,
    SplitSpec,
    build_binary_dataset,
    build_multiclass_dataset,
    train_test_split,
)
from .errors import ConfigError, ModelError
from .events import Session
from .features import ScalerParams, apply_scaler, extract_features, fit_scaler, to_coord_vector, to_speed_signal
from .metrics import RocCurve, UserMetrics, evaluate_scores
from .neural.network import TrainConfig, TrainHistory, build_ann, build_cnn, train

REPRESENTATION_FOR_KIND = {
    "knn": "features",
    "rf": "features",
    "svm": "features",
    "cnn": "speed",
    "ann": "coords",
}

FEATURE_KINDS = ("knn", "rf", "svm")

# the ci preset trades release-scale training for runtime; tolerances widen
PRESETS = {
    "release": {"n_trees": 1600, "epochs": 100},
    "ci": {"n_trees": 200, "epochs": 20},
}


def default_hyperparams(kind: str, preset: str = "release") -> dict:
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}, expected one of {sorted(PRESETS)}")
    p = PRESETS[preset]
    if kind == "knn":
        return {"k": 13}
    if kind == "rf":
        return {
            "n_trees": p["n_trees"],
            "max_depth": 30,
            "min_samples_split": 2,
            "min_samples_leaf": 1,
            "bootstrap": False,
        }
    if kind == "svm":
        return {"C": 1.0, "gamma": None, "tol": 1e-3, "max_passes": 200}
    if kind == "cnn":
        return {
            "epochs": p["epochs"],
            "batch_size": 64,
            "learning_rate": 0.001,
            "decay": 1e-6,
            "filters": [32, 64],
            "kernel_width": 3,
            "dense_units": 60,
        }
    if kind == "ann":
        return {
            "epochs": p["epochs"],
            "batch_size": 64,
            "learning_rate": 0.001,
            "decay": 1e-6,
            "hidden": [256, 256, 128, 128, 64, 64],
        }
    raise ConfigError(f"unknown model kind {kind!r}")


def derive_seed(*parts: int) -> int:
    """Stable sub-seed for one unit of work (target user, model family)."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, dtype=np.uint64)[0])


def actions_from_sessions(sessions: list[Session],
                          block_len: int = DEFAULT_BLOCK_LEN) -> dict[int, list[MouseAction]]:
    """Segment every session; per-subject action indices stay sequential
    across multiple sessions of the same subject."""
    out: dict[int, list[MouseAction]] = {}
    for session in sessions:
        have = out.setdefault(session.subject, [])
        offset = len(have)
        for action in segment(session, block_len):
            have.append(MouseAction(
                subject=action.subject,
                events=action.events,
                action_index=offset + action.action_index,
            ))
    return out


def action_matrix(actions: list[MouseAction], representation: str) -> np.ndarray:
    if representation == "features":
        return np.stack([extract_features(compute_kinematics(a), a) for a in actions])
    if representation == "speed":
        return np.stack([to_speed_signal(compute_kinematics(a)) for a in actions])
    if representation == "coords":
        return np.stack([to_coord_vector(a) for a in actions])
    raise ConfigError(f"unknown representation {representation!r}")


def user_matrices(actions_by_user: dict[int, list[MouseAction]],
                  representation: str) -> dict[int, np.ndarray]:
    return {
        u: action_matrix(acts, representation)
        for u, acts in sorted(actions_by_user.items())
        if acts
    }


def dataset_manifest(ds: LabeledDataset, split: SplitSpec, block_len: int,
                     representation: str) -> dict:
    contributions: dict[str, int] = {}
    for subject, _ in ds.provenance:
        key = str(subject)
        contributions[key] = contributions.get(key, 0) + 1
    values, counts = np.unique(ds.labels, return_counts=True)
    return {
        "n_rows": len(ds),
        "block_len": block_len,
        "representation": representation,
        "class_counts": {str(int(v)): int(c) for v, c in zip(values, counts)},
        "contributions": contributions,
        "split": {
            "train_fraction": split.train_fraction,
            "seed": split.seed,
            "stratified": split.stratified,
        },
    }


def split_from_manifest(manifest: dict) -> SplitSpec:
    s = manifest["split"]
    return SplitSpec(
        train_fraction=s["train_fraction"],
        seed=s["seed"],
        stratified=s["stratified"],
    )


@dataclass(frozen=True)
class FittedModel:
    kind: str
    model: object
    scaler: ScalerParams | None
    history: TrainHistory | None
    arch: dict | None


def network_arch(kind: str, hyperparams: dict, block_len: int, n_classes: int) -> dict:
    if kind == "cnn":
        return {
            "family": "cnn",
            "length": block_len,
            "in_channels": 2,
            "filters": list(hyperparams["filters"]),
            "kernel_width": hyperparams["kernel_width"],
            "dense_units": hyperparams["dense_units"],
        }
    return {
        "family": "ann",
        "n_features": 2 * block_len,
        "n_classes": n_classes,
        "hidden": list(hyperparams["hidden"]),
    }


def _train_config(hyperparams: dict, model_seed: int) -> TrainConfig:
    return TrainConfig(
        epochs=hyperparams["epochs"],
        batch_size=hyperparams["batch_size"],
        learning_rate=hyperparams["learning_rate"],
        decay=hyperparams["decay"],
        seed=model_seed,
    )


def fit_model(kind: str, train_ds: LabeledDataset, test_ds: LabeledDataset,
              hyperparams: dict, model_seed: int, block_len: int,
              n_classes: int = 2, n_jobs: int = 1) -> FittedModel:
    """Fit one model of any kind on the train partition.

    Neural kinds use the held-out partition as the validation stream for
    peak-accuracy checkpointing; evaluation reports their peak testing
    accuracy.
    """
    if kind in FEATURE_KINDS:
        scaler = fit_scaler(train_ds.rows)
        xs = apply_scaler(scaler, train_ds.rows)
        if kind == "knn":
            model = knn_fit(xs, train_ds.labels, k=hyperparams["k"])
        elif kind == "rf":
            config = ForestConfig(
                n_trees=hyperparams["n_trees"],
                max_depth=hyperparams["max_depth"],
                min_samples_split=hyperparams["min_samples_split"],
                min_samples_leaf=hyperparams["min_samples_leaf"],
                bootstrap=hyperparams["bootstrap"],
            )
            model = rf_fit(xs, train_ds.labels, config, seed=model_seed, n_jobs=n_jobs)
        else:
            model = svm_fit(
                xs, train_ds.labels,
                C=hyperparams["C"],
                gamma=hyperparams["gamma"],
                tol=hyperparams["tol"],
                max_passes=hyperparams["max_passes"],
                seed=model_seed,
            )
        return FittedModel(kind, model, scaler, None, None)

    arch = network_arch(kind, hyperparams, block_len, n_classes)
    if kind == "cnn":
        net = build_cnn(
            length=arch["length"],
            in_channels=arch["in_channels"],
            filters=tuple(arch["filters"]),
            kernel_width=arch["kernel_width"],
            dense_units=arch["dense_units"],
            seed=model_seed,
        )
    elif kind == "ann":
        net = build_ann(
            n_features=arch["n_features"],
            n_classes=arch["n_classes"],
            hidden=tuple(arch["hidden"]),
            seed=model_seed,
        )
    else:
        raise ModelError(f"unknown model kind {kind!r}")
    history = train(
        net, train_ds.rows, train_ds.labels,
        test_ds.rows, test_ds.labels,
        _train_config(hyperparams, model_seed),
    )
    return FittedModel(kind, net, None, history, arch)


def score_rows(kind: str, model, scaler: ScalerParams | None, rows: np.ndarray) -> np.ndarray:
    """Positive-class scores in [0, 1] for any binary kind."""
    if kind in FEATURE_KINDS:
        if scaler is None:
            raise ModelError(f"{kind} artifact is missing its scaler")
        xs = apply_scaler(scaler, rows)
        if kind == "knn":
            return knn_score_batch(model, xs)
        if kind == "rf":
            return rf_predict_proba(model, xs)
        return svm_score(model, xs)
    if kind == "cnn":
        return model.predict_scores(rows)
    raise ModelError(f"kind {kind!r} does not produce binary scores")


def evaluate_binary(kind: str, model, scaler: ScalerParams | None,
                    test_ds: LabeledDataset, user: int) -> tuple[UserMetrics, RocCurve]:
    scores = score_rows(kind, model, scaler, test_ds.rows)
    return evaluate_scores(user, scores, test_ds.labels)


def history_dict(history: TrainHistory | None) -> dict | None:
    return None if history is None else asdict(history)


def binary_user_run(kind: str, target: int, mats: dict[int, np.ndarray],
                    seed: int, split: SplitSpec, hyperparams: dict,
                    block_len: int, n_jobs: int = 1):
    """Build, split, and fit one target user's balanced binary dataset.

    Returns (fitted, manifest, train_ds, test_ds); the manifest is what the
    artifact embeds and what evaluation later uses to rebuild the split.
    """
    ds = build_binary_dataset(target, mats, seed)
    train_ds, test_ds = train_test_split(ds, split)
    manifest = dataset_manifest(ds, split, block_len, REPRESENTATION_FOR_KIND[kind])
    model_seed = derive_seed(seed, 0, target)
    fitted = fit_model(kind, train_ds, test_ds, hyperparams, model_seed,
                       block_len, n_jobs=n_jobs)
    return fitted, manifest, train_ds, test_ds


def multiclass_run(mats: dict[int, np.ndarray], seed: int, split: SplitSpec,
                   hyperparams: dict, block_len: int):
    """Build, split, and fit the all-users multiclass dataset (ANN)."""
    ds = build_multiclass_dataset(mats)
    users = sorted(mats)
    class_of = {u: i for i, u in enumerate(users)}
    relabeled = LabeledDataset(
        rows=ds.rows,
        labels=np.array([class_of[int(v)] for v in ds.labels], dtype=int),
        provenance=ds.provenance,
    )
    train_ds, test_ds = train_test_split(relabeled, split)
    manifest = dataset_manifest(relabeled, split, block_len, REPRESENTATION_FOR_KIND["ann"])
    manifest["class_of"] = {str(u): class_of[u] for u in users}
    model_seed = derive_seed(seed, 1)
    fitted = fit_model("ann", train_ds, test_ds, hyperparams, model_seed,
                       block_len, n_classes=len(users))
    return fitted, manifest, train_ds, test_ds
