"""Evaluation reports: JSON documents, text tables, ROC exports, SVG plots.

Binary kinds render the per-user table followed by the top-10 aggregate.
Classical kinds report ACC, FPR, FNR and F1; deep binary kinds omit FNR;
the multiclass ANN reports only the peak train/test accuracy pair. The
consolidated comparison merges one aggregate row per model family.
"""

import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .metrics import Aggregate, EvalReport, RocCurve, UserMetrics

REPORT_VERSION = 1

CLASSICAL_COLUMNS = ("acc", "fpr", "fnr", "f1")
DEEP_BINARY_COLUMNS = ("acc", "fpr", "f1")
DEEP_BINARY_KINDS = ("cnn",)

_HEADER = {"acc": "ACC", "fpr": "FPR", "fnr": "FNR", "f1": "F1"}


def table_columns(kind: str) -> tuple[str, ...]:
    return DEEP_BINARY_COLUMNS if kind in DEEP_BINARY_KINDS else CLASSICAL_COLUMNS


def report_to_doc(report: EvalReport) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "kind": report.model_kind,
        "partition": report.partition,
        "per_user": [
            {name: getattr(r, name) for name in ("user",) + UserMetrics.METRIC_FIELDS}
            for r in report.per_user
        ],
        "aggregate": {
            "users": list(report.aggregate.users),
            "mean": report.aggregate.mean,
            "std": report.aggregate.std,
            "over_all_users": report.aggregate.over_all_users,
        },
        "manifest": report.manifest,
        "roc": {
            str(user): {
                "thresholds": [float(v) for v in curve.thresholds],
                "fpr": [float(v) for v in curve.fpr],
                "tpr": [float(v) for v in curve.tpr],
                "auc": float(curve.auc),
            }
            for user, curve in report.roc_curves.items()
        },
    }


def doc_to_report(doc: dict) -> EvalReport:
    per_user = tuple(
        UserMetrics(**{k: rec[k] for k in ("user",) + UserMetrics.METRIC_FIELDS})
        for rec in doc["per_user"]
    )
    agg = doc["aggregate"]
    roc_curves = {
        int(user): RocCurve(
            thresholds=np.array(c["thresholds"], dtype=float),
            fpr=np.array(c["fpr"], dtype=float),
            tpr=np.array(c["tpr"], dtype=float),
            auc=c["auc"],
        )
        for user, c in doc.get("roc", {}).items()
    }
    return EvalReport(
        model_kind=doc["kind"],
        partition=doc["partition"],
        per_user=per_user,
        aggregate=Aggregate(
            users=tuple(agg["users"]),
            mean=agg["mean"],
            std=agg["std"],
            over_all_users=agg["over_all_users"],
        ),
        manifest=doc.get("manifest", {}),
        roc_curves=roc_curves,
    )


def ann_report_doc(history: dict, manifest: dict, partition: str = "test") -> dict:
    if not history.get("train_acc"):
        raise DataError("ann history has no epochs to report")
    return {
        "report_version": REPORT_VERSION,
        "kind": "ann",
        "partition": partition,
        "peak_train_acc": max(history["train_acc"]),
        "peak_test_acc": max(history["val_acc"]),
        "best_epoch": history["best_epoch"],
        "epochs": len(history["train_acc"]),
        "manifest": manifest,
        "history": history,
    }


def write_report(path: str | Path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def read_report(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a valid report: {exc}")
    if not isinstance(doc, dict) or doc.get("report_version") != REPORT_VERSION:
        raise DataError(f"{path}: not a version-{REPORT_VERSION} report")
    return doc


def render_binary_table(doc: dict) -> str:
    cols = table_columns(doc["kind"])
    lines = [f"model {doc['kind']} ({doc['partition']} partition)"]
    lines.append("  ".join(["user".rjust(6)] + [_HEADER[c].rjust(8) for c in cols]))
    for rec in doc["per_user"]:
        cells = [f"{rec['user']:6d}"] + [f"{rec[c]:8.4f}" for c in cols]
        lines.append("  ".join(cells))
    agg = doc["aggregate"]
    scope = "all users" if agg["over_all_users"] else "top 10 by ACC"
    lines.append(f"aggregate ({scope}): users {', '.join(str(u) for u in agg['users'])}")
    lines.append("  ".join(["mean".rjust(6)] + [f"{agg['mean'][c]:8.4f}" for c in cols]))
    lines.append("  ".join(["std".rjust(6)] + [f"{agg['std'][c]:8.4f}" for c in cols]))
    return "\n".join(lines) + "\n"


def render_ann_table(doc: dict) -> str:
    lines = [
        f"model ann ({doc['partition']} partition)",
        f"peak training accuracy  {doc['peak_train_acc']:.4f}",
        f"peak testing accuracy   {doc['peak_test_acc']:.4f}",
        f"best epoch              {doc['best_epoch']}",
    ]
    return "\n".join(lines) + "\n"


def render_table(doc: dict) -> str:
    return render_ann_table(doc) if doc["kind"] == "ann" else render_binary_table(doc)


def render_comparison(docs: list[dict]) -> str:
    """One ranking row per model family, best accuracy first."""
    rows = []
    for doc in docs:
        if doc["kind"] == "ann":
            rows.append({"kind": "ann", "acc": doc["peak_test_acc"],
                         "fpr": None, "fnr": None, "f1": None})
        else:
            mean = doc["aggregate"]["mean"]
            rows.append({
                "kind": doc["kind"],
                "acc": mean["acc"],
                "fpr": mean["fpr"],
                "fnr": None if doc["kind"] in DEEP_BINARY_KINDS else mean["fnr"],
                "f1": mean["f1"],
            })
    rows.sort(key=lambda r: (-r["acc"], r["kind"]))

    def cell(v) -> str:
        return "       -" if v is None else f"{v:8.4f}"

    lines = ["  ".join(["model".rjust(6), "ACC".rjust(8), "FPR".rjust(8),
                        "FNR".rjust(8), "F1".rjust(8)])]
    for r in rows:
        lines.append("  ".join([r["kind"].rjust(6), cell(r["acc"]), cell(r["fpr"]),
                                cell(r["fnr"]), cell(r["f1"])]))
    return "\n".join(lines) + "\n"


def roc_csv_lines(doc: dict):
    """Delimited ROC points for every user in one report."""
    yield "user,threshold,fpr,tpr"
    for user in sorted(doc.get("roc", {}), key=int):
        curve = doc["roc"][user]
        for t, fp, tp in zip(curve["thresholds"], curve["fpr"], curve["tpr"]):
            yield f"{user},{t!r},{fp!r},{tp!r}"


def write_roc_csv(path: str | Path, doc: dict) -> None:
    Path(path).write_text("\n".join(roc_csv_lines(doc)) + "\n")


def plot_roc_overlay(doc: dict, path: str | Path) -> None:
    """SVG overlay: one ROC polyline per user plus the chance diagonal."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    users = sorted(doc.get("roc", {}), key=int)
    for user in users:
        curve = doc["roc"][user]
        ax.plot(curve["fpr"], curve["tpr"], linewidth=0.9, label=f"user {user}")
    ax.plot([0.0, 1.0], [0.0, 1.0], linestyle="--", linewidth=0.9,
            color="grey", label="chance")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(f"ROC per user: {doc['kind']}")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.05)
    if len(users) <= 12:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
