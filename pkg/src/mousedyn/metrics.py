"""Confusion-based metrics, ROC/AUC, equal error rate, and the top-10
aggregation used for reporting.

The positive class is the genuine user, so FPR is the fraction of imposter
samples accepted. Prediction is positive at score >= threshold (ties accept).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Rates:
    """Derived rates; any 0/0 ratio is reported as 0 and flagged in ``degenerate``."""

    acc: float
    fpr: float
    fnr: float
    precision: float
    recall: float
    f1: float
    degenerate: frozenset[str] = frozenset()


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep points and the trapezoidal AUC.

    Points are ordered by descending threshold (the first is a +inf
    sentinel), so FPR and TPR are non-decreasing along the sequence and the
    (FPR, TPR) polyline runs from (0, 0) to (1, 1).
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def _validate_scores(scores, labels, need_both_classes: bool):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("scores and labels must be 1-D and equal length")
    if len(scores) < 1:
        raise DataError("need at least one sample")
    if need_both_classes and (labels.min() == labels.max()):
        raise DataError("need both classes present")
    return scores, labels


def confusion(scores, labels, threshold: float = 0.5) -> ConfusionCounts:
    """Counts at a single threshold; predict positive iff score >= threshold."""
    scores, labels = _validate_scores(scores, labels, need_both_classes=False)
    pred = scores >= threshold
    pos = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def rates(c: ConfusionCounts) -> Rates:
    """ACC, FPR, FNR, precision, recall, F1 from confusion counts."""
    if c.total < 1:
        raise DataError("confusion counts are empty")
    degenerate = set()

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            degenerate.add(name)
            return 0.0
        return num / den

    acc = (c.tp + c.tn) / c.total
    fpr = ratio(c.fp, c.fp + c.tn, "fpr")
    fnr = ratio(c.fn, c.fn + c.tp, "fnr")
    precision = ratio(c.tp, c.tp + c.fp, "precision")
    recall = ratio(c.tp, c.tp + c.fn, "recall")
    if precision + recall == 0.0:
        degenerate.add("f1")
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return Rates(acc=acc, fpr=fpr, fnr=fnr, precision=precision, recall=recall,
                 f1=f1, degenerate=frozenset(degenerate))


def _sweep(scores: np.ndarray, labels: np.ndarray):
    """FPR and TPR at thresholds = +inf sentinel then unique scores descending."""
    n_pos = int(np.sum(labels == 1))
    n_neg = len(labels) - n_pos
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = (labels[order] == 1).astype(float)

    distinct = np.nonzero(np.diff(sorted_scores))[0]
    last_of_tie = np.append(distinct, len(scores) - 1)
    tp_cum = np.cumsum(sorted_pos)[last_of_tie]
    fp_cum = (last_of_tie + 1) - tp_cum

    thresholds = np.concatenate(([np.inf], sorted_scores[last_of_tie]))
    tpr = np.concatenate(([0.0], tp_cum / n_pos))
    fpr = np.concatenate(([0.0], fp_cum / n_neg))
    return thresholds, fpr, tpr


def roc(scores, labels) -> RocCurve:
    """ROC over the sorted unique scores plus a +inf sentinel; trapezoidal AUC."""
    scores, labels = _validate_scores(scores, labels, need_both_classes=True)
    thresholds, fpr, tpr = _sweep(scores, labels)
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=auc)


def eer(scores, labels) -> float:
    """Equal error rate: the value where FPR = FNR along the threshold sweep.

    FPR - FNR is monotone as the threshold falls, so a single crossing
    exists; between adjacent sweep points the rate pair is interpolated
    linearly, and an exact crossing returns that point's value.
    """
    scores, labels = _validate_scores(scores, labels, need_both_classes=True)
    _, fpr, tpr = _sweep(scores, labels)
    fnr = 1.0 - tpr
    diff = fpr - fnr
    idx = int(np.searchsorted(diff, 0.0, side="left"))  # first diff >= 0
    if idx == 0:
        return float(fpr[0])
    d1, d2 = diff[idx - 1], diff[idx]
    t = d1 / (d1 - d2)  # d2 == 0 gives t == 1: the exact-crossing value
    return float(fpr[idx - 1] + t * (fpr[idx] - fpr[idx - 1]))


@dataclass(frozen=True)
class UserMetrics:
    """One user's evaluation record."""

    user: int
    acc: float
    fpr: float
    fnr: float
    precision: float
    recall: float
    f1: float
    auc: float
    eer: float

    METRIC_FIELDS = ("acc", "fpr", "fnr", "precision", "recall", "f1", "auc", "eer")


@dataclass(frozen=True)
class Aggregate:
    """Mean and population std per metric over the selected users."""

    users: tuple[int, ...]
    mean: dict[str, float]
    std: dict[str, float]
    over_all_users: bool = False  # set when fewer than 10 users were available


def aggregate_top10(per_user: list[UserMetrics]) -> Aggregate:
    """Mean/population-std of each metric over the 10 highest-ACC users.

    Ties in ACC break toward the lower user id. With fewer than 10 users the
    aggregate covers all of them and is flagged.
    """
    if not per_user:
        raise DataError("no per-user records to aggregate")
    ranked = sorted(per_user, key=lambda r: (-r.acc, r.user))
    short = len(ranked) < 10
    selected = ranked if short else ranked[:10]
    mean, std = {}, {}
    for name in UserMetrics.METRIC_FIELDS:
        vals = np.array([getattr(r, name) for r in selected], dtype=float)
        mean[name] = float(vals.mean())
        std[name] = float(vals.std())
    return Aggregate(
        users=tuple(r.user for r in selected),
        mean=mean,
        std=std,
        over_all_users=short,
    )


@dataclass(frozen=True)
class EvalReport:
    """Per-user records plus the top-10 aggregate for one model kind."""

    model_kind: str
    partition: str
    per_user: tuple[UserMetrics, ...]
    aggregate: Aggregate
    manifest: dict = field(default_factory=dict)
    roc_curves: dict[int, RocCurve] = field(default_factory=dict)


def evaluate_scores(user: int, scores, labels, threshold: float = 0.5) -> tuple[UserMetrics, RocCurve]:
    """All per-user metrics from one score/label set."""
    r = rates(confusion(scores, labels, threshold))
    curve = roc(scores, labels)
    return (
        UserMetrics(user=user, acc=r.acc, fpr=r.fpr, fnr=r.fnr,
                    precision=r.precision, recall=r.recall, f1=r.f1,
                    auc=curve.auc, eer=eer(scores, labels)),
        curve,
    )
