"""Mouse-dynamics continuous authentication toolkit.

Raw pointer events are segmented into fixed-length actions, summarized as
kinematic feature vectors, and fed to from-scratch classifiers (KNN, random
forest, RBF SVM, a 1D-CNN over velocity signals, and a multiclass ANN over
raw coordinates). Evaluation follows the balanced one-vs-rest protocol with
top-10 aggregation; a streaming EWMA trust monitor turns per-action scores
into ok/suspect/alarm decisions.
"""

from .actions import DEFAULT_BLOCK_LEN, Kinematics, MouseAction, compute_kinematics, segment
from .datasets import (
    LabeledDataset,
    SplitSpec,
    build_binary_dataset,
    build_multiclass_dataset,
    train_test_split,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DataError,
    DivergenceError,
    ModelError,
    MousedynError,
    ParseError,
)
from .events import (
    RawEvent,
    Session,
    SyntheticProfile,
    parse_events,
    serialize_sessions,
    synthesize_session,
)
from .features import (
    FEATURE_NAMES,
    FEATURE_ORDER_VERSION,
    N_FEATURES,
    ScalerParams,
    apply_scaler,
    extract_features,
    fit_scaler,
    to_coord_vector,
    to_speed_signal,
)
from .metrics import (
    Aggregate,
    ConfusionCounts,
    EvalReport,
    Rates,
    RocCurve,
    UserMetrics,
    aggregate_top10,
    confusion,
    eer,
    evaluate_scores,
    rates,
    roc,
)
from .streaming import (
    BlockBuffer,
    StreamSummary,
    TrustMonitor,
    TrustPolicy,
    TrustUpdate,
    stream_authenticate,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BLOCK_LEN", "Kinematics", "MouseAction", "compute_kinematics", "segment",
    "LabeledDataset", "SplitSpec", "build_binary_dataset",
    "build_multiclass_dataset", "train_test_split",
    "ConfigError", "ConvergenceError", "DataError", "DivergenceError",
    "ModelError", "MousedynError", "ParseError",
    "RawEvent", "Session", "SyntheticProfile", "parse_events",
    "serialize_sessions", "synthesize_session",
    "FEATURE_NAMES", "FEATURE_ORDER_VERSION", "N_FEATURES", "ScalerParams",
    "apply_scaler", "extract_features", "fit_scaler", "to_coord_vector",
    "to_speed_signal",
    "Aggregate", "ConfusionCounts", "EvalReport", "Rates", "RocCurve",
    "UserMetrics", "aggregate_top10", "confusion", "eer", "evaluate_scores",
    "rates", "roc",
    "BlockBuffer", "StreamSummary", "TrustMonitor", "TrustPolicy",
    "TrustUpdate", "stream_authenticate",
    "__version__",
]
