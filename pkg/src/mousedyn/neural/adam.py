"""Adam optimizer with the inverse-time learning-rate decay schedule.

The step applied at update t (counting completed updates before it) uses
lr_t = learning_rate / (1 + decay * t), so the very first update sees the
full learning rate. Moment estimates follow the standard bias-corrected
form m_hat / (sqrt(v_hat) + eps).
"""

import numpy as np

from ..errors import ModelError


class Adam:
    def __init__(self, layers, learning_rate: float = 0.001, decay: float = 1e-6,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.layers = layers
        self.learning_rate = learning_rate
        self.decay = decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = {}
        self._v = {}
        for li, layer in enumerate(layers):
            for name, p in layer.params.items():
                self._m[(li, name)] = np.zeros_like(p)
                self._v[(li, name)] = np.zeros_like(p)

    def step(self) -> None:
        lr = self.learning_rate / (1.0 + self.decay * self.t)
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for li, layer in enumerate(self.layers):
            for name, p in layer.params.items():
                g = layer.grads[name]
                if not np.all(np.isfinite(g)):
                    raise ModelError(f"non-finite gradient in layer {li} parameter {name!r}")
                m = self._m[(li, name)]
                v = self._v[(li, name)]
                m *= self.beta1
                m += (1.0 - self.beta1) * g
                v *= self.beta2
                v += (1.0 - self.beta2) * np.square(g)
                p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
