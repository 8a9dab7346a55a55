"""Feed-forward networks assembled from the layer primitives.

Two heads are supported: "softmax_ce" (multiclass logits scored by softmax
cross-entropy against integer labels) and "bce" (a single logit scored by
sigmoid binary cross-entropy). Probabilities are floored at 1e-12 inside the
losses so early, badly-scaled batches cannot produce infinite loss on their
own; a genuinely non-finite loss aborts training with DivergenceError.

Training shuffles with its own seeded generator, runs Adam with inverse-time
decay, and tracks the epoch with the highest validation accuracy; those
parameters are restored when training ends.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError, DivergenceError
from .adam import Adam
from .layers import Conv1d, Dense, GlobalMaxPool, Relu

ANN_HIDDEN = (256, 256, 128, 128, 64, 64)
CNN_FILTERS = (32, 64)
CNN_KERNEL_WIDTH = 3
CNN_DENSE_UNITS = 60

_PROB_FLOOR = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax_ce(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    n = len(targets)
    n_classes = logits.shape[1]
    if np.any(targets < 0) or np.any(targets >= n_classes):
        raise DataError(f"class labels must lie in [0, {n_classes})")
    p = softmax(logits)
    picked = np.maximum(p[np.arange(n), targets], _PROB_FLOOR)
    loss = float(-np.mean(np.log(picked)))
    grad = p
    grad[np.arange(n), targets] -= 1.0
    return loss, grad / n


def _bce(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    z = logits[:, 0]
    if np.any((targets != 0) & (targets != 1)):
        raise DataError("binary labels must be 0 or 1")
    y = targets.astype(float)
    p = np.clip(sigmoid(z), _PROB_FLOOR, 1.0 - _PROB_FLOOR)
    loss = float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
    grad = ((p - y) / len(y))[:, None]
    return loss, grad


_LOSSES = {"softmax_ce": _softmax_ce, "bce": _bce}


class Network:
    def __init__(self, layers: list, loss: str):
        if loss not in _LOSSES:
            raise ConfigError(f"unknown loss {loss!r}, expected one of {sorted(_LOSSES)}")
        self.layers = layers
        self.loss = loss

    def forward(self, x: np.ndarray) -> np.ndarray:
        out = x
        for layer in self.layers:
            out = layer.forward(out)
        return out

    def backward(self, grad: np.ndarray) -> None:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)

    def loss_and_grad(self, logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
        return _LOSSES[self.loss](logits, targets)

    def predict_scores(self, x: np.ndarray) -> np.ndarray:
        """Class probability matrix for softmax_ce, positive-class column for bce."""
        logits = self.forward(np.asarray(x, dtype=float))
        if self.loss == "bce":
            return sigmoid(logits[:, 0])
        return softmax(logits)

    def predict_labels(self, x: np.ndarray) -> np.ndarray:
        scores = self.predict_scores(x)
        if self.loss == "bce":
            return (scores >= 0.5).astype(int)
        return np.argmax(scores, axis=1)

    def accuracy(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(self.predict_labels(x) == np.asarray(y)))

    def get_params(self) -> list[dict[str, np.ndarray]]:
        return [{name: p.copy() for name, p in layer.params.items()}
                for layer in self.layers]

    def set_params(self, saved: list[dict[str, np.ndarray]]) -> None:
        for layer, snap in zip(self.layers, saved):
            for name, p in snap.items():
                layer.params[name][...] = p


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 64
    learning_rate: float = 0.001
    decay: float = 1e-6
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be at least 1")
        if self.learning_rate <= 0 or self.decay < 0:
            raise ConfigError("learning_rate must be positive and decay non-negative")


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    train_acc: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_acc: list[float] = field(default_factory=list)
    best_epoch: int = -1
    best_val_acc: float = float("nan")


def train(net: Network, x: np.ndarray, y: np.ndarray,
          x_val: np.ndarray | None = None, y_val: np.ndarray | None = None,
          config: TrainConfig | None = None) -> TrainHistory:
    """Optimize in place; with validation data the parameters from the
    peak-validation-accuracy epoch are restored before returning."""
    config = config or TrainConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    n = len(x)
    rng = np.random.default_rng([config.seed, 1])
    optimizer = Adam(net.layers, config.learning_rate, config.decay)
    history = TrainHistory()
    best_params = None
    have_val = x_val is not None and y_val is not None

    for epoch in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            logits = net.forward(x[idx])
            loss, grad = net.loss_and_grad(logits, y[idx])
            if not np.isfinite(loss):
                raise DivergenceError(f"non-finite loss at epoch {epoch}", epoch)
            net.backward(grad)
            optimizer.step()
            loss_sum += loss * len(idx)
        history.train_loss.append(loss_sum / n)
        history.train_acc.append(net.accuracy(x, y))
        if have_val:
            val_logits = net.forward(np.asarray(x_val, dtype=float))
            val_loss, _ = net.loss_and_grad(val_logits, np.asarray(y_val))
            acc = net.accuracy(x_val, y_val)
            history.val_loss.append(val_loss)
            history.val_acc.append(acc)
            if history.best_epoch < 0 or acc > history.best_val_acc:
                history.best_epoch = epoch
                history.best_val_acc = acc
                best_params = net.get_params()

    if best_params is not None:
        net.set_params(best_params)
    return history


def build_ann(n_features: int = 20, n_classes: int = 40,
              hidden: tuple[int, ...] = ANN_HIDDEN, seed: int = 0) -> Network:
    """Multiclass perceptron over flattened action coordinates."""
    if n_classes < 2:
        raise ConfigError("build_ann needs at least 2 classes")
    rng = np.random.default_rng([seed, 0])
    layers: list = []
    fan_in = n_features
    for width in hidden:
        layers.append(Dense(fan_in, width, rng))
        layers.append(Relu())
        fan_in = width
    layers.append(Dense(fan_in, n_classes, rng))
    return Network(layers, loss="softmax_ce")


def build_cnn(length: int = 10, in_channels: int = 2,
              filters: tuple[int, int] = CNN_FILTERS,
              kernel_width: int = CNN_KERNEL_WIDTH,
              dense_units: int = CNN_DENSE_UNITS, seed: int = 0) -> Network:
    """Binary convolutional classifier over per-action velocity signals."""
    if length < 2 * (kernel_width - 1) + 1:
        raise ConfigError(
            f"signal length {length} too short for two width-{kernel_width} convolutions"
        )
    rng = np.random.default_rng([seed, 0])
    layers = [
        Conv1d(in_channels, filters[0], kernel_width, rng),
        Relu(),
        Conv1d(filters[0], filters[1], kernel_width, rng),
        Relu(),
        GlobalMaxPool(),
        Dense(filters[1], dense_units, rng),
        Relu(),
        Dense(dense_units, 1, rng),
    ]
    return Network(layers, loss="bce")
