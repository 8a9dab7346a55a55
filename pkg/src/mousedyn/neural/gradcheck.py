"""Finite-difference validation of the hand-written backward passes."""

import numpy as np

from .network import Network


def check_gradients(net: Network, x: np.ndarray, y: np.ndarray,
                    n_checks: int = 5, h: float = 1e-5, seed: int = 0) -> float:
    """Compare analytic gradients against central differences.

    Samples n_checks entries from every parameter array and returns the
    largest relative error |g_a - g_n| / max(|g_a| + |g_n|, 1e-8) seen.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    rng = np.random.default_rng(seed)

    logits = net.forward(x)
    _, grad = net.loss_and_grad(logits, y)
    net.backward(grad)
    analytic = [{name: g.copy() for name, g in layer.grads.items()}
                for layer in net.layers]

    def loss_at() -> float:
        out = net.forward(x)
        loss, _ = net.loss_and_grad(out, y)
        return loss

    worst = 0.0
    for li, layer in enumerate(net.layers):
        for name, p in layer.params.items():
            flat = p.reshape(-1)
            picks = rng.choice(flat.size, size=min(n_checks, flat.size), replace=False)
            for idx in picks:
                keep = flat[idx]
                flat[idx] = keep + h
                up = loss_at()
                flat[idx] = keep - h
                down = loss_at()
                flat[idx] = keep
                numeric = (up - down) / (2.0 * h)
                g_a = analytic[li][name].reshape(-1)[idx]
                err = abs(g_a - numeric) / max(abs(g_a) + abs(numeric), 1e-8)
                worst = max(worst, err)
    return worst
