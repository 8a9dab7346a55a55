"""Versioned JSON artifacts for fitted models.

One document per model: kind, hyperparameters, scaler parameters, canonical
feature-order version, dataset manifest, seed, and the kind-specific
parameters (stored rows / trees / support vectors / layer weights). Output
is deterministic (sorted keys, compact separators, no timestamps), so
rerunning a command with the same config writes byte-identical files.
"""

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .classical.forest import ForestConfig, ForestModel
from .classical.knn import KnnModel
from .classical.svm import SvmModel
from .errors import ModelError
from .features import FEATURE_ORDER_VERSION, ScalerParams
from .neural.network import Network, build_ann, build_cnn

ARTIFACT_VERSION = 1

MODEL_KINDS = ("knn", "rf", "svm", "cnn", "ann")
BINARY_KINDS = ("knn", "rf", "svm", "cnn")


def _encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "data": [float(v) for v in a.ravel()]}


def _decode_array(d: dict) -> np.ndarray:
    return np.array(d["data"], dtype=float).reshape(d["shape"])


def _scaler_to_doc(scaler: ScalerParams | None) -> dict | None:
    if scaler is None:
        return None
    return {"lo": _encode_array(scaler.lo), "hi": _encode_array(scaler.hi)}


def _scaler_from_doc(doc: dict | None) -> ScalerParams | None:
    if doc is None:
        return None
    return ScalerParams(lo=_decode_array(doc["lo"]), hi=_decode_array(doc["hi"]))


def _knn_params(model: KnnModel) -> dict:
    return {
        "rows": _encode_array(model.rows),
        "labels": [int(v) for v in model.labels],
        "k": model.k,
    }


def _knn_restore(p: dict) -> KnnModel:
    return KnnModel(
        rows=_decode_array(p["rows"]),
        labels=np.array(p["labels"], dtype=int),
        k=p["k"],
    )


def _forest_params(model: ForestModel) -> dict:
    return {"trees": list(model.trees), "config": asdict(model.config), "seed": model.seed}


def _forest_restore(p: dict) -> ForestModel:
    return ForestModel(
        trees=tuple(p["trees"]),
        config=ForestConfig(**p["config"]),
        seed=p["seed"],
    )


def _svm_params(model: SvmModel) -> dict:
    return {
        "support_vectors": _encode_array(model.support_vectors),
        "dual_coef": _encode_array(model.dual_coef),
        "alphas": _encode_array(model.alphas),
        "sv_labels": _encode_array(model.sv_labels),
        "bias": float(model.bias),
        "gamma": float(model.gamma),
        "C": float(model.C),
    }


def _svm_restore(p: dict) -> SvmModel:
    return SvmModel(
        support_vectors=_decode_array(p["support_vectors"]),
        dual_coef=_decode_array(p["dual_coef"]),
        alphas=_decode_array(p["alphas"]),
        sv_labels=_decode_array(p["sv_labels"]),
        bias=p["bias"],
        gamma=p["gamma"],
        C=p["C"],
    )


def _network_params(net: Network, arch: dict) -> dict:
    return {
        "arch": arch,
        "layers": [
            {name: _encode_array(p) for name, p in layer.params.items()}
            for layer in net.layers
        ],
    }


def _network_restore(p: dict) -> Network:
    arch = p["arch"]
    family = arch.get("family")
    if family == "ann":
        net = build_ann(
            n_features=arch["n_features"],
            n_classes=arch["n_classes"],
            hidden=tuple(arch["hidden"]),
        )
    elif family == "cnn":
        net = build_cnn(
            length=arch["length"],
            in_channels=arch["in_channels"],
            filters=tuple(arch["filters"]),
            kernel_width=arch["kernel_width"],
            dense_units=arch["dense_units"],
        )
    else:
        raise ModelError(f"unknown network family {family!r}")
    for layer, snap in zip(net.layers, p["layers"]):
        for name, enc in snap.items():
            layer.params[name][...] = _decode_array(enc)
    return net


def build_artifact(kind: str, *, params: dict, hyperparams: dict, seed: int,
                   block_len: int, manifest: dict, representation: str,
                   scaler: ScalerParams | None = None,
                   target_user: int | None = None,
                   history: dict | None = None) -> dict:
    if kind not in MODEL_KINDS:
        raise ModelError(f"unknown model kind {kind!r}")
    return {
        "artifact_version": ARTIFACT_VERSION,
        "feature_order_version": FEATURE_ORDER_VERSION,
        "kind": kind,
        "representation": representation,
        "target_user": target_user,
        "seed": seed,
        "block_len": block_len,
        "hyperparams": hyperparams,
        "scaler": _scaler_to_doc(scaler),
        "manifest": manifest,
        "history": history,
        "params": params,
    }


_TO_PARAMS = {
    "knn": _knn_params,
    "rf": _forest_params,
    "svm": _svm_params,
}

_FROM_PARAMS = {
    "knn": _knn_restore,
    "rf": _forest_restore,
    "svm": _svm_restore,
}


def model_params(kind: str, model) -> dict:
    """Kind-specific parameter block; networks need the architecture too,
    so they go through :func:`_network_params` via ``network_params``."""
    try:
        return _TO_PARAMS[kind](model)
    except KeyError:
        raise ModelError(f"no parameter encoder for kind {kind!r}")


def network_params(net: Network, arch: dict) -> dict:
    return _network_params(net, arch)


def restore_model(doc: dict):
    """Rebuild the fitted model object held in an artifact document."""
    kind = doc["kind"]
    if kind in _FROM_PARAMS:
        return _FROM_PARAMS[kind](doc["params"])
    if kind in ("ann", "cnn"):
        return _network_restore(doc["params"])
    raise ModelError(f"unknown model kind {kind!r}")


def restore_scaler(doc: dict) -> ScalerParams | None:
    return _scaler_from_doc(doc.get("scaler"))


def dump_artifact(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def write_artifact(path: str | Path, doc: dict) -> None:
    Path(path).write_text(dump_artifact(doc) + "\n")


def read_artifact(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not a valid artifact: {exc}")
    if not isinstance(doc, dict) or "artifact_version" not in doc:
        raise ModelError(f"{path}: not a model artifact")
    if doc["artifact_version"] != ARTIFACT_VERSION:
        raise ModelError(
            f"{path}: artifact version {doc['artifact_version']} "
            f"not supported (expected {ARTIFACT_VERSION})"
        )
    if doc.get("feature_order_version") != FEATURE_ORDER_VERSION:
        raise ModelError(
            f"{path}: feature order version {doc.get('feature_order_version')} "
            f"does not match current {FEATURE_ORDER_VERSION}"
        )
    return doc
