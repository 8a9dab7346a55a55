"""Feature extraction, min-max scaling, neural encodings, feature files."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from mousedyn.actions import compute_kinematics
from mousedyn.errors import DataError
from mousedyn.features import (
    FEATURE_NAMES,
    FEATURE_ORDER_VERSION,
    N_FEATURES,
    ScalerParams,
    apply_scaler,
    extract_features,
    feature_dict,
    feature_file_lines,
    fit_scaler,
    parse_feature_file,
    to_coord_vector,
    to_speed_signal,
)
from test_actions import make_action

EXPECTED_NAMES = tuple(
    f"{seq}_{stat}"
    for seq in ("speed", "vx", "vy", "accel", "jerk", "ang_vel", "curvature")
    for stat in ("mean", "std", "min", "max")
) + (
    "trajectory_length", "end_to_end_distance", "straightness",
    "elapsed_time", "overall_direction",
)


def test_canonical_feature_order_is_frozen():
    assert FEATURE_ORDER_VERSION == 1
    assert N_FEATURES == 33
    assert FEATURE_NAMES == EXPECTED_NAMES


def test_extract_features_hand_example():
    action = make_action([(0, 0), (1, 0), (3, 0), (3, 2)])
    vec = extract_features(compute_kinematics(action), action)
    assert vec.shape == (33,)
    named = feature_dict(vec)

    speed = np.array([1.0, 2.0, 2.0])
    assert named["speed_mean"] == pytest.approx(speed.mean())
    assert named["speed_std"] == pytest.approx(speed.std())  # population std
    assert named["speed_min"] == 1.0
    assert named["speed_max"] == 2.0
    assert named["jerk_mean"] == pytest.approx(-1.0)
    assert named["trajectory_length"] == 5.0
    assert named["end_to_end_distance"] == pytest.approx(np.sqrt(13.0))
    assert named["straightness"] == pytest.approx(np.sqrt(13.0) / 5.0)
    assert named["elapsed_time"] == 3.0
    assert named["overall_direction"] == pytest.approx(np.arctan2(2.0, 3.0))


def test_straightness_is_one_on_a_straight_line():
    action = make_action([(0, 0), (1, 0), (2, 0), (3, 0)])
    named = feature_dict(extract_features(compute_kinematics(action), action))
    assert named["straightness"] == 1.0


def test_stationary_action_has_zero_motion_stats():
    action = make_action([(5, 5)] * 10)
    named = feature_dict(extract_features(compute_kinematics(action), action))
    for name, value in named.items():
        if name == "elapsed_time":
            assert value == 9.0
        else:
            assert value == 0.0  # includes straightness = 0 under the clip


def test_short_actions_stay_finite():
    # 2- and 3-event actions lack some derivative sequences entirely; their
    # stats must read as zeros rather than raising
    for n in (2, 3):
        action = make_action([(i, 2 * i) for i in range(n)])
        vec = extract_features(compute_kinematics(action), action)
        assert vec.shape == (33,)
        assert np.all(np.isfinite(vec))
        named = feature_dict(vec)
        assert named["jerk_mean"] == 0.0


def test_scaler_maps_train_matrix_into_unit_box():
    m = np.array([[0.0, 5.0, 7.0], [10.0, 5.0, 9.0], [5.0, 5.0, 8.0]])
    params = fit_scaler(m)
    scaled = apply_scaler(params, m)
    assert scaled.min() >= 0.0 and scaled.max() <= 1.0
    assert np.allclose(scaled[:, 0], [0.0, 1.0, 0.5])
    # constant slot maps to 0
    assert np.allclose(scaled[:, 1], 0.0)


def test_scaler_extrapolates_without_clipping():
    params = fit_scaler(np.array([[0.0], [10.0]]))
    out = apply_scaler(params, np.array([[20.0], [-10.0]]))
    assert out[0, 0] == 2.0
    assert out[1, 0] == -1.0


def test_scaler_validation():
    with pytest.raises(ValueError):
        ScalerParams(lo=np.array([1.0]), hi=np.array([0.0]))
    with pytest.raises(DataError):
        fit_scaler(np.empty((0, 3)))
    with pytest.raises(DataError):
        fit_scaler(np.array([1.0, 2.0]))


@given(hnp.arrays(np.float64, (7, 4), elements=st.floats(-1e6, 1e6)))
@settings(max_examples=50, deadline=None)
def test_scaler_range_property(matrix):
    params = fit_scaler(matrix)
    scaled = apply_scaler(params, matrix)
    assert np.all(scaled >= -1e-9) and np.all(scaled <= 1.0 + 1e-9)


def test_speed_signal_shape_and_zero_padding():
    action = make_action([(0, 0), (1, 0), (3, 0), (3, 2)])
    sig = to_speed_signal(compute_kinematics(action))
    assert sig.shape == (4, 2)
    assert np.all(sig[0] == 0.0)
    assert np.allclose(sig[1:, 0], [1, 2, 0])
    assert np.allclose(sig[1:, 1], [0, 0, 2])


def test_speed_signal_is_translation_invariant():
    pts = [(3.0, 1.0), (4.0, 2.5), (6.0, 2.0), (7.5, 4.0)]
    base = to_speed_signal(compute_kinematics(make_action(pts)))
    moved = to_speed_signal(compute_kinematics(
        make_action([(x + 500.0, y - 250.0) for x, y in pts])))
    assert np.array_equal(base, moved)


def test_coord_vector_interleaves():
    action = make_action([(1, 2), (3, 4), (5, 6)])
    assert np.array_equal(to_coord_vector(action), [1, 2, 3, 4, 5, 6])


def test_feature_file_round_trip_exact():
    rng = np.random.default_rng(4)
    matrix = rng.normal(scale=1e3, size=(5, N_FEATURES))
    labels = [1, 0, 1, 0, 1]
    provenance = [(3, 0), (7, 2), (3, 1), (9, 0), (3, 2)]
    text = "\n".join(feature_file_lines(matrix, labels, provenance)) + "\n"
    m2, l2, p2 = parse_feature_file(text)
    assert np.array_equal(m2, matrix)       # repr floats round-trip exactly
    assert np.array_equal(l2, labels)
    assert p2 == tuple(provenance)


def test_feature_file_header_is_mandatory():
    rows = list(feature_file_lines(np.zeros((1, N_FEATURES)), [0], [(1, 0)]))
    with pytest.raises(DataError, match="header"):
        parse_feature_file("\n".join(rows[1:]))
    tampered = rows[0].replace("speed_mean", "velocity_mean")
    with pytest.raises(DataError, match="header"):
        parse_feature_file("\n".join([tampered] + rows[1:]))


def test_feature_file_column_count_checked():
    rows = list(feature_file_lines(np.zeros((1, N_FEATURES)), [0], [(1, 0)]))
    with pytest.raises(DataError, match="line 2"):
        parse_feature_file("\n".join([rows[0], rows[1] + ",99"]))
    with pytest.raises(DataError, match="empty"):
        parse_feature_file("")
