"""Network layers with hand-written forward and backward passes.

Every layer keeps its parameters and the matching gradients in dicts keyed
by name so the optimizer can walk them generically. Weights use Xavier
uniform initialization, limit = sqrt(6 / (fan_in + fan_out)); biases start
at zero.
"""

import numpy as np


def xavier_uniform(rng: np.random.Generator, shape: tuple[int, ...],
                   fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Dense:
    """Affine map x @ W + b for 2-D inputs (batch, fan_in)."""

    def __init__(self, fan_in: int, fan_out: int, rng: np.random.Generator):
        self.params = {
            "w": xavier_uniform(rng, (fan_in, fan_out), fan_in, fan_out),
            "b": np.zeros(fan_out),
        }
        self.grads = {name: np.zeros_like(p) for name, p in self.params.items()}
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        self.grads["w"] = self._x.T @ grad_out
        self.grads["b"] = grad_out.sum(axis=0)
        return grad_out @ self.params["w"].T


class Relu:
    def __init__(self):
        self.params = {}
        self.grads = {}
        self._mask = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return np.where(self._mask, grad_out, 0.0)


class Conv1d:
    """Valid (no padding) stride-1 convolution over (batch, length, channels)."""

    def __init__(self, in_channels: int, out_channels: int, width: int,
                 rng: np.random.Generator):
        fan_in = width * in_channels
        fan_out = width * out_channels
        self.width = width
        self.params = {
            "w": xavier_uniform(rng, (width, in_channels, out_channels), fan_in, fan_out),
            "b": np.zeros(out_channels),
        }
        self.grads = {name: np.zeros_like(p) for name, p in self.params.items()}
        self._cols = None
        self._in_shape = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        w = self.width
        # windows come out as (batch, length - w + 1, channels, w)
        windows = np.lib.stride_tricks.sliding_window_view(x, w, axis=1)
        cols = np.ascontiguousarray(windows.transpose(0, 1, 3, 2))
        self._cols = cols.reshape(cols.shape[0], cols.shape[1], -1)
        self._in_shape = x.shape
        w2d = self.params["w"].reshape(-1, self.params["w"].shape[-1])
        return self._cols @ w2d + self.params["b"]

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        w = self.width
        batch, n_out, c_out = grad_out.shape
        w2d = self.params["w"].reshape(-1, c_out)
        flat_cols = self._cols.reshape(-1, w2d.shape[0])
        flat_grad = grad_out.reshape(-1, c_out)
        self.grads["w"] = (flat_cols.T @ flat_grad).reshape(self.params["w"].shape)
        self.grads["b"] = flat_grad.sum(axis=0)
        grad_cols = (grad_out @ w2d.T).reshape(batch, n_out, w, -1)
        grad_x = np.zeros(self._in_shape)
        for k in range(w):  # overlapping windows accumulate
            grad_x[:, k:k + n_out, :] += grad_cols[:, :, k, :]
        return grad_x


class GlobalMaxPool:
    """Max over the time axis: (batch, length, channels) -> (batch, channels)."""

    def __init__(self):
        self.params = {}
        self.grads = {}
        self._argmax = None
        self._in_shape = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._argmax = np.argmax(x, axis=1)
        self._in_shape = x.shape
        return np.take_along_axis(x, self._argmax[:, None, :], axis=1)[:, 0, :]

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        grad_x = np.zeros(self._in_shape)
        np.put_along_axis(grad_x, self._argmax[:, None, :], grad_out[:, None, :], axis=1)
        return grad_x
