"""The 33-dimension feature vector, min-max scaling, and the neural input
encodings (speed signals for the convolutional path, raw coordinate vectors
for the multi-class path).

Canonical feature order, versioned as FEATURE_ORDER_VERSION: mean/std/min/max
of the seven kinematic sequences (speed, vx, vy, accel, jerk, ang_vel,
curvature), then trajectory_length, end_to_end_distance, straightness,
elapsed_time, overall_direction. Summary std is the population std.
"""

from dataclasses import dataclass

import numpy as np

from .actions import EPS_DIST, Kinematics, MouseAction
from .errors import DataError

FEATURE_ORDER_VERSION = 1

_SEQUENCES = ("speed", "vx", "vy", "accel", "jerk", "ang_vel", "curvature")
_STATS = ("mean", "std", "min", "max")
_TRAJECTORY = ("trajectory_length", "end_to_end_distance", "straightness",
               "elapsed_time", "overall_direction")

FEATURE_NAMES: tuple[str, ...] = tuple(
    f"{seq}_{stat}" for seq in _SEQUENCES for stat in _STATS
) + _TRAJECTORY

N_FEATURES = len(FEATURE_NAMES)  # 33


def extract_features(kin: Kinematics, action: MouseAction) -> np.ndarray:
    """Feature vector of an action in canonical order, shape (33,)."""
    parts = []
    for name in _SEQUENCES:
        seq = kin.sequences()[name]
        if len(seq) == 0:
            # 2- and 3-event actions have no accel/jerk/ang_vel derivatives;
            # their stats read as zero motion so every slot stays finite
            parts.extend((0.0, 0.0, 0.0, 0.0))
        else:
            parts.extend((seq.mean(), seq.std(), seq.min(), seq.max()))

    xy = action.xy()
    t = action.times()
    trajectory_length = float(kin.dist.sum())
    end_to_end = float(np.hypot(*(xy[-1] - xy[0])))
    straightness = min(end_to_end / max(trajectory_length, EPS_DIST), 1.0)
    elapsed = float(t[-1] - t[0])
    direction = float(np.arctan2(xy[-1, 1] - xy[0, 1], xy[-1, 0] - xy[0, 0]))
    parts.extend((trajectory_length, end_to_end, straightness, elapsed, direction))
    return np.array(parts, dtype=float)


def feature_dict(vector: np.ndarray) -> dict[str, float]:
    """Name the slots of one feature vector."""
    return {name: float(v) for name, v in zip(FEATURE_NAMES, vector)}


@dataclass(frozen=True)
class ScalerParams:
    """Per-slot (min, max) learned on a training matrix."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if np.any(self.hi < self.lo):
            raise ValueError("scaler max must be >= min per slot")


def fit_scaler(matrix: np.ndarray) -> ScalerParams:
    """Column-wise min/max over the rows of a feature matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] < 1:
        raise DataError("fit_scaler needs a non-empty 2-D matrix")
    return ScalerParams(lo=matrix.min(axis=0), hi=matrix.max(axis=0))


def apply_scaler(params: ScalerParams, v: np.ndarray) -> np.ndarray:
    """Map slots to (x - min) / (max - min).

    Constant slots (max == min) map to 0; values outside the fitted range
    extrapolate linearly, deliberately without clipping.
    """
    v = np.asarray(v, dtype=float)
    span = params.hi - params.lo
    safe = np.where(span > 0, span, 1.0)
    scaled = (v - params.lo) / safe
    return np.where(span > 0, scaled, 0.0)


def to_speed_signal(kin: Kinematics) -> np.ndarray:
    """(block_len, 2) velocity signal for the convolutional model.

    Only block_len - 1 velocities exist, so timestep 0 is zero-padded to keep
    the signal length equal to the block length.
    """
    n = len(kin.vx) + 1
    signal = np.zeros((n, 2), dtype=float)
    signal[1:, 0] = kin.vx
    signal[1:, 1] = kin.vy
    return signal


def to_coord_vector(action: MouseAction) -> np.ndarray:
    """Interleaved raw absolute coordinates (x1, y1, ..., xn, yn)."""
    return action.xy().reshape(-1)


_EXTRA_COLUMNS = ("label", "subject", "action_index")


def feature_file_lines(matrix: np.ndarray, labels, provenance):
    """Delimited feature rows: 33 canonical columns + label/subject/action_index.

    Floats are written with repr so reading the file back is exact.
    """
    yield ",".join(FEATURE_NAMES + _EXTRA_COLUMNS)
    for row, label, (subject, idx) in zip(np.asarray(matrix, dtype=float), labels, provenance):
        cells = [repr(float(v)) for v in row]
        cells += [str(int(label)), str(int(subject)), str(int(idx))]
        yield ",".join(cells)


def parse_feature_file(text: str):
    """Inverse of :func:`feature_file_lines`.

    Returns (matrix, labels, provenance); the header row is mandatory and
    must list the canonical columns.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError("feature file is empty")
    expected = ",".join(FEATURE_NAMES + _EXTRA_COLUMNS)
    if lines[0].strip() != expected:
        raise DataError("feature file header does not match the canonical column order")
    rows, labels, provenance = [], [], []
    for line_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != N_FEATURES + len(_EXTRA_COLUMNS):
            raise DataError(f"line {line_no}: expected {N_FEATURES + 3} columns, got {len(cells)}")
        rows.append([float(c) for c in cells[:N_FEATURES]])
        labels.append(int(cells[N_FEATURES]))
        provenance.append((int(cells[N_FEATURES + 1]), int(cells[N_FEATURES + 2])))
    return np.array(rows, dtype=float), np.array(labels, dtype=int), tuple(provenance)
