"""From-scratch neural networks: layers, Adam, training, gradient checks."""

from .adam import Adam
from .gradcheck import check_gradients
from .layers import Conv1d, Dense, GlobalMaxPool, Relu, xavier_uniform
from .network import (
    ANN_HIDDEN,
    CNN_DENSE_UNITS,
    CNN_FILTERS,
    CNN_KERNEL_WIDTH,
    Network,
    TrainConfig,
    TrainHistory,
    build_ann,
    build_cnn,
    sigmoid,
    softmax,
    train,
)

__all__ = [
    "ANN_HIDDEN",
    "Adam",
    "CNN_DENSE_UNITS",
    "CNN_FILTERS",
    "CNN_KERNEL_WIDTH",
    "Conv1d",
    "Dense",
    "GlobalMaxPool",
    "Network",
    "Relu",
    "TrainConfig",
    "TrainHistory",
    "build_ann",
    "build_cnn",
    "check_gradients",
    "sigmoid",
    "softmax",
    "train",
    "xavier_uniform",
]
