"""Soft-margin RBF-kernel SVM trained by sequential minimal optimization.

The dual is optimized by pairwise alpha updates (Platt-style outer loop with
the second-choice heuristic) until every KKT violation is below tol. The
kernel is K(u, v) = exp(-gamma * ||u - v||^2); gamma defaults to
1 / (d * var(X)) so it adapts to the feature scaling. The bias is set from
the on-margin (unbounded) support vectors, averaged when there are several,
with a bound-interval midpoint fallback when every alpha sits on a bound.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError, DataError

_STEP_EPS = 1e-7      # minimum relative alpha change that counts as progress
_BOUND_EPS = 1e-10    # distance from 0 / C treated as "on the bound"


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray        # alpha_i * y_i per support vector
    alphas: np.ndarray
    sv_labels: np.ndarray        # y in {-1, +1}
    bias: float
    gamma: float
    C: float


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """Pairwise K(a_i, b_j) = exp(-gamma ||a_i - b_j||^2)."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    d2 = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(d2, 0.0))


def default_gamma(x: np.ndarray) -> float:
    var = float(np.var(x))
    d = x.shape[1]
    return 1.0 / (d * var) if var > 0 else 1.0 / d


def _kkt_violations(alphas: np.ndarray, y: np.ndarray, f: np.ndarray, C: float) -> np.ndarray:
    """Per-point KKT residual at decision values f (bias included)."""
    r = y * f - 1.0
    at_zero = alphas <= _BOUND_EPS
    at_c = alphas >= C - _BOUND_EPS
    viol = np.abs(r)
    viol[at_zero] = np.maximum(0.0, -r[at_zero])
    viol[at_c] = np.maximum(0.0, r[at_c])
    return viol


def _finalize_bias(alphas: np.ndarray, y: np.ndarray, g: np.ndarray, C: float) -> float:
    """Bias from the margin condition; g is the decision value without bias."""
    unbounded = (alphas > _BOUND_EPS) & (alphas < C - _BOUND_EPS)
    if np.any(unbounded):
        return float(np.mean(y[unbounded] - g[unbounded]))
    # all alphas on a bound: y_i (g_i + b) >= 1 for alpha = 0 and <= 1 for
    # alpha = C, so each point gives b >= y_i - g_i or b <= y_i - g_i; take
    # the midpoint of the feasible interval
    bound = y - g
    is_lower = (alphas <= _BOUND_EPS) == (y > 0)
    lo = float(np.max(bound[is_lower])) if np.any(is_lower) else -np.inf
    hi = float(np.min(bound[~is_lower])) if np.any(~is_lower) else np.inf
    if not np.isfinite(lo):
        return hi if np.isfinite(hi) else 0.0
    if not np.isfinite(hi):
        return lo
    return (lo + hi) / 2.0


class _Smo:
    def __init__(self, kernel: np.ndarray, y: np.ndarray, C: float, tol: float,
                 rng: np.random.Generator):
        self.K = kernel
        self.y = y
        self.C = C
        self.tol = tol
        self.rng = rng
        self.n = len(y)
        self.alphas = np.zeros(self.n)
        self.b = 0.0
        self.g = np.zeros(self.n)  # K @ (alphas * y), maintained incrementally

    def errors(self) -> np.ndarray:
        return self.g + self.b - self.y

    def take_step(self, i: int, j: int) -> bool:
        if i == j:
            return False
        a_i, a_j = self.alphas[i], self.alphas[j]
        y_i, y_j = self.y[i], self.y[j]
        e_i = self.g[i] + self.b - y_i
        e_j = self.g[j] + self.b - y_j
        s = y_i * y_j
        if s > 0:
            lo, hi = max(0.0, a_i + a_j - self.C), min(self.C, a_i + a_j)
        else:
            lo, hi = max(0.0, a_j - a_i), min(self.C, self.C + a_j - a_i)
        if lo >= hi:
            return False
        k_ii, k_jj, k_ij = self.K[i, i], self.K[j, j], self.K[i, j]
        eta = k_ii + k_jj - 2.0 * k_ij
        if eta > 0:
            a_j_new = a_j + y_j * (e_i - e_j) / eta
            a_j_new = min(max(a_j_new, lo), hi)
        else:
            # degenerate curvature (duplicate points): objective is linear in
            # a_j, so the maximum sits at an end of the feasible segment
            f_i = y_i * e_i - a_i * k_ii - s * a_j * k_ij
            f_j = y_j * e_j - a_j * k_jj - s * a_i * k_ij
            l_i = a_i + s * (a_j - lo)
            h_i = a_i + s * (a_j - hi)
            obj_lo = (l_i * f_i + lo * f_j + 0.5 * l_i ** 2 * k_ii
                      + 0.5 * lo ** 2 * k_jj + s * lo * l_i * k_ij)
            obj_hi = (h_i * f_i + hi * f_j + 0.5 * h_i ** 2 * k_ii
                      + 0.5 * hi ** 2 * k_jj + s * hi * h_i * k_ij)
            if obj_lo < obj_hi - _STEP_EPS:
                a_j_new = lo
            elif obj_lo > obj_hi + _STEP_EPS:
                a_j_new = hi
            else:
                return False
        if abs(a_j_new - a_j) < _STEP_EPS * (a_j_new + a_j + _STEP_EPS):
            return False
        a_i_new = a_i + s * (a_j - a_j_new)

        # bias update keeps the error cache usable between steps
        b1 = self.b - e_i - y_i * (a_i_new - a_i) * k_ii - y_j * (a_j_new - a_j) * k_ij
        b2 = self.b - e_j - y_i * (a_i_new - a_i) * k_ij - y_j * (a_j_new - a_j) * k_jj
        if _BOUND_EPS < a_i_new < self.C - _BOUND_EPS:
            self.b = b1
        elif _BOUND_EPS < a_j_new < self.C - _BOUND_EPS:
            self.b = b2
        else:
            self.b = (b1 + b2) / 2.0

        self.g += (a_i_new - a_i) * y_i * self.K[i] + (a_j_new - a_j) * y_j * self.K[j]
        self.alphas[i] = a_i_new
        self.alphas[j] = a_j_new
        return True

    def examine(self, j: int) -> bool:
        y_j = self.y[j]
        a_j = self.alphas[j]
        e_j = self.g[j] + self.b - y_j
        r_j = e_j * y_j
        if not ((r_j < -self.tol and a_j < self.C) or (r_j > self.tol and a_j > 0)):
            return False
        errors = self.errors()
        nonbound = np.nonzero((self.alphas > _BOUND_EPS) & (self.alphas < self.C - _BOUND_EPS))[0]
        if len(nonbound) > 1:
            i = int(nonbound[np.argmax(np.abs(errors[nonbound] - e_j))])
            if self.take_step(i, j):
                return True
        for pool in (nonbound, np.arange(self.n)):
            if len(pool) == 0:
                continue
            start = int(self.rng.integers(len(pool)))
            for off in range(len(pool)):
                if self.take_step(int(pool[(start + off) % len(pool)]), j):
                    return True
        return False


def svm_fit(rows: np.ndarray, labels: np.ndarray, C: float = 1.0,
            gamma: float | None = None, tol: float = 1e-3,
            max_passes: int = 200, seed: int = 0) -> SvmModel:
    """Train by SMO; raises :class:`ConvergenceError` carrying the residual
    KKT violation if max_passes full sweeps do not reach tol."""
    x = np.asarray(rows, dtype=float)
    labels = np.asarray(labels)
    if x.ndim != 2 or len(x) < 2:
        raise DataError("need a 2-D matrix with at least 2 rows")
    if labels.min() == labels.max():
        raise DataError("training data contains a single class")
    if gamma is None:
        gamma = default_gamma(x)
    if gamma <= 0:
        raise DataError(f"gamma must be positive, got {gamma}")
    y = np.where(labels == 1, 1.0, -1.0)

    smo = _Smo(rbf_kernel(x, x, gamma), y, C, tol, np.random.default_rng(seed))
    examine_all = True
    converged = False
    for _ in range(max_passes):
        targets = (
            np.arange(smo.n) if examine_all
            else np.nonzero((smo.alphas > _BOUND_EPS) & (smo.alphas < C - _BOUND_EPS))[0]
        )
        n_changed = sum(smo.examine(int(j)) for j in targets)
        if examine_all:
            if n_changed == 0:
                # no admissible step under the working bias; judge against
                # the finalized bias and re-anchor to it, so the sweep gate
                # and the convergence criterion agree on what violates
                bias = _finalize_bias(smo.alphas, y, smo.g, C)
                if float(np.max(_kkt_violations(smo.alphas, y, smo.g + bias, C))) < tol:
                    converged = True
                    break
                if bias == smo.b:
                    break  # re-anchoring changed nothing: genuinely stuck
                smo.b = bias
                continue
            examine_all = False
        elif n_changed == 0:
            examine_all = True

    bias = _finalize_bias(smo.alphas, y, smo.g, C)
    residual = float(np.max(_kkt_violations(smo.alphas, y, smo.g + bias, C)))
    if not converged and residual >= tol:
        raise ConvergenceError(
            f"SMO stalled with max KKT violation {residual:.3e} "
            f"(tol {tol}) within {max_passes} passes",
            residual,
        )

    keep = smo.alphas > _BOUND_EPS
    return SvmModel(
        support_vectors=x[keep],
        dual_coef=smo.alphas[keep] * y[keep],
        alphas=smo.alphas[keep],
        sv_labels=y[keep],
        bias=bias,
        gamma=gamma,
        C=C,
    )


def svm_decision(model: SvmModel, queries: np.ndarray) -> np.ndarray:
    """Signed decision values f(x) = sum_i alpha_i y_i K(x_i, x) + b."""
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    k = rbf_kernel(model.support_vectors, q, model.gamma)
    return model.dual_coef @ k + model.bias


def svm_score(model: SvmModel, queries: np.ndarray) -> np.ndarray:
    """Decision values squashed to [0, 1] for ROC reporting."""
    return 1.0 / (1.0 + np.exp(-svm_decision(model, queries)))


def dual_objective(alphas: np.ndarray, y: np.ndarray, kernel: np.ndarray) -> float:
    """W(alpha) = sum(alpha) - 0.5 * sum_ij alpha_i alpha_j y_i y_j K_ij."""
    ay = alphas * y
    return float(np.sum(alphas) - 0.5 * ay @ kernel @ ay)
