"""Confusion metrics, ROC/AUC, EER, and top-10 aggregation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mousedyn.errors import DataError
from mousedyn.metrics import (
    Aggregate,
    ConfusionCounts,
    UserMetrics,
    aggregate_top10,
    confusion,
    eer,
    evaluate_scores,
    rates,
    roc,
)


def test_confusion_hand_example():
    scores = [0.9, 0.5, 0.4, 0.2, 0.7, 0.5]
    labels = [1, 1, 1, 0, 0, 0]
    c = confusion(scores, labels, threshold=0.5)
    # score == threshold predicts positive
    assert (c.tp, c.fp, c.tn, c.fn) == (2, 2, 1, 1)
    assert c.total == 6


def test_rates_hand_example():
    r = rates(ConfusionCounts(tp=3, fp=1, tn=4, fn=2))
    assert r.acc == pytest.approx(0.7)
    assert r.fpr == pytest.approx(0.2)
    assert r.fnr == pytest.approx(0.4)
    assert r.precision == pytest.approx(0.75)
    assert r.recall == pytest.approx(0.6)
    assert r.f1 == pytest.approx(2 * 0.75 * 0.6 / 1.35)
    assert r.degenerate == frozenset()


def test_rates_degenerate_ratios_are_zero_and_flagged():
    r = rates(ConfusionCounts(tp=0, fp=0, tn=0, fn=4))
    assert r.fpr == 0.0 and r.precision == 0.0 and r.f1 == 0.0
    assert {"fpr", "precision", "f1"} <= set(r.degenerate)
    with pytest.raises(DataError):
        rates(ConfusionCounts(0, 0, 0, 0))


def test_score_label_validation():
    with pytest.raises(DataError):
        confusion([], [])
    with pytest.raises(DataError):
        confusion([0.5, 0.6], [1])
    with pytest.raises(DataError, match="both classes"):
        roc([0.1, 0.9], [1, 1])


def test_roc_hand_example_with_ties():
    curve = roc([0.9, 0.8, 0.8, 0.3], [1, 1, 0, 0])
    assert np.array_equal(curve.thresholds, [np.inf, 0.9, 0.8, 0.3])
    assert np.allclose(curve.fpr, [0.0, 0.0, 0.5, 1.0])
    assert np.allclose(curve.tpr, [0.0, 0.5, 1.0, 1.0])
    assert curve.auc == pytest.approx(0.875)


def test_roc_extremes():
    assert roc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]).auc == pytest.approx(1.0)
    assert roc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]).auc == pytest.approx(0.0)
    # all scores equal: single diagonal step, AUC 1/2
    assert roc([0.5, 0.5, 0.5, 0.5], [1, 1, 0, 0]).auc == pytest.approx(0.5)


def pair_count_auc(scores, labels):
    """O(n^2) tie-aware oracle: wins + half-ties over positive/negative pairs."""
    s = np.asarray(scores, dtype=float)
    pos = s[np.asarray(labels) == 1]
    neg = s[np.asarray(labels) == 0]
    wins = np.sum(pos[:, None] > neg[None, :])
    ties = np.sum(pos[:, None] == neg[None, :])
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def test_auc_equals_pair_counting_on_random_sets():
    rng = np.random.default_rng(8)
    for _ in range(25):
        n = int(rng.integers(4, 60))
        scores = np.round(rng.random(n), 2)  # rounding engineers ties
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        assert roc(scores, labels).auc == pytest.approx(
            pair_count_auc(scores, labels), abs=1e-12)


def test_eer_hand_examples():
    assert eer([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == pytest.approx(0.0)
    # symmetric confusion: FPR = FNR = 0.5 exactly at threshold 0.6
    assert eer([0.9, 0.6, 0.4, 0.1], [1, 0, 1, 0]) == pytest.approx(0.5)
    # crossing between sweep points interpolates linearly
    assert eer([0.9, 0.7, 0.3], [1, 0, 1]) == pytest.approx(0.5)


def test_eer_bounds():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(4, 50))
        scores = rng.random(n)
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        v = eer(scores, labels)
        assert 0.0 <= v <= 1.0


# scores sit on a 1e-3 grid: adjacent raw floats can collapse into a tie
# under exp/1-x, which changes the threshold set and is not a metrics bug
unique_floats = st.lists(
    st.integers(1, 999), min_size=4, max_size=40, unique=True,
).map(lambda ks: [k / 1000.0 for k in ks])


@given(unique_floats, st.integers(0, 2**31 - 1))
@settings(max_examples=50, deadline=None)
def test_auc_is_invariant_under_monotone_transforms(scores, seed):
    scores = np.array(scores)
    labels = np.random.default_rng(seed).integers(0, 2, len(scores))
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    base = roc(scores, labels).auc
    warped = roc(np.exp(3.0 * scores), labels).auc
    assert warped == pytest.approx(base, abs=1e-12)


@given(unique_floats, st.integers(0, 2**31 - 1))
@settings(max_examples=50, deadline=None)
def test_eer_is_symmetric_under_class_and_score_flip(scores, seed):
    scores = np.array(scores)
    labels = np.random.default_rng(seed).integers(0, 2, len(scores))
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    flipped = eer(1.0 - scores, 1 - labels)
    assert flipped == pytest.approx(eer(scores, labels), abs=1e-9)


def test_roc_curve_is_monotone():
    rng = np.random.default_rng(12)
    scores = rng.random(200)
    labels = rng.integers(0, 2, 200)
    curve = roc(scores, labels)
    assert np.all(np.diff(curve.fpr) >= 0)
    assert np.all(np.diff(curve.tpr) >= 0)
    assert curve.fpr[0] == 0.0 and curve.fpr[-1] == 1.0
    assert curve.tpr[0] == 0.0 and curve.tpr[-1] == 1.0


def make_user(user, acc):
    return UserMetrics(user=user, acc=acc, fpr=0.1, fnr=0.1, precision=0.9,
                       recall=0.9, f1=0.9, auc=0.95, eer=0.05)


def test_aggregate_selects_top10_by_acc_with_id_tiebreak():
    records = [make_user(u, acc) for u, acc in [
        (5, 0.90), (1, 0.95), (9, 0.80), (2, 0.95), (3, 0.70), (4, 0.85),
        (6, 0.85), (7, 0.60), (8, 0.75), (10, 0.65), (11, 0.55), (12, 0.50),
    ]]
    agg = aggregate_top10(records)
    assert agg.users == (1, 2, 5, 4, 6, 9, 8, 3, 10, 7)
    assert not agg.over_all_users
    accs = np.array([0.95, 0.95, 0.90, 0.85, 0.85, 0.80, 0.75, 0.70, 0.65, 0.60])
    assert agg.mean["acc"] == pytest.approx(accs.mean())
    assert agg.std["acc"] == pytest.approx(accs.std())  # population std


def test_aggregate_with_fewer_than_ten_users_flags_itself():
    agg = aggregate_top10([make_user(1, 0.9), make_user(2, 0.8)])
    assert agg.over_all_users
    assert agg.users == (1, 2)
    assert isinstance(agg, Aggregate)
    with pytest.raises(DataError):
        aggregate_top10([])


def test_evaluate_scores_is_consistent_with_parts():
    rng = np.random.default_rng(5)
    scores = rng.random(80)
    labels = rng.integers(0, 2, 80)
    um, curve = evaluate_scores(7, scores, labels)
    assert um.user == 7
    assert um.auc == curve.auc
    assert um.eer == eer(scores, labels)
    r = rates(confusion(scores, labels, 0.5))
    assert (um.acc, um.fpr, um.fnr, um.f1) == (r.acc, r.fpr, r.fnr, r.f1)
