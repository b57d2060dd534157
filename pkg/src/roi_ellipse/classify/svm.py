"""RBF-kernel SVM trained by sequential minimal optimization.

The dual problem min 0.5*a'Qa - sum(a) s.t. 0 <= a_i <= C_i, sum(a_i*y_i)=0
is solved with maximal-violating-pair working-set selection: at each step
the pair (i, j) most violating the KKT conditions is updated analytically
within its box. Selection is a plain argmax/argmin, so training is fully
deterministic. Class imbalance is handled by scaling each class's box
constraint inversely to its frequency (on by default).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # (n_sv, d)
    alpha_y: np.ndarray  # signed dual coefficients alpha_i * y_i
    bias: float
    gamma: float
    C: float
    c_pos: float
    c_neg: float
    dual_objective: float = 0.0
    n_iter: int = 0

    def __post_init__(self):
        sv = np.asarray(self.support_vectors, dtype=np.float64)
        ay = np.asarray(self.alpha_y, dtype=np.float64)
        sv.setflags(write=False)
        ay.setflags(write=False)
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "alpha_y", ay)

    def to_json_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "alpha_y": self.alpha_y.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "C": self.C,
            "c_pos": self.c_pos,
            "c_neg": self.c_neg,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "SvmModel":
        return SvmModel(
            support_vectors=np.array(d["support_vectors"], dtype=np.float64),
            alpha_y=np.array(d["alpha_y"], dtype=np.float64),
            bias=float(d["bias"]),
            gamma=float(d["gamma"]),
            C=float(d["C"]),
            c_pos=float(d["c_pos"]),
            c_neg=float(d["c_neg"]),
        )


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||u - v||^2) for all row pairs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sq = (
        (a**2).sum(axis=1)[:, None]
        + (b**2).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _as_signed_labels(labels) -> np.ndarray:
    lab = np.asarray(labels)
    if lab.dtype == bool:
        return np.where(lab, 1.0, -1.0)
    vals = np.unique(lab)
    if not np.all(np.isin(vals, (-1, 1))):
        raise ValueError("labels must be boolean or in {-1, +1}")
    return lab.astype(np.float64)


def svm_train(
    X,
    labels,
    C: float = 10.0,
    gamma: float | None = None,
    tol: float = 1e-3,
    balanced: bool = True,
    max_iter: int = 500_000,
) -> SvmModel:
    """Fit the dual SVM by SMO to KKT satisfaction within ``tol``.

    Raises on single-class data. ``gamma=None`` defaults to 1/n_features.
    """
    X = np.asarray(X, dtype=np.float64)
    y = _as_signed_labels(labels)
    n, d = X.shape
    if y.shape[0] != n:
        raise ValueError("label count must match row count")
    n_pos = int((y > 0).sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("degenerate training set: both classes required")
    if gamma is None:
        gamma = 1.0 / d
    if balanced:
        c_pos = C * n / (2.0 * n_pos)
        c_neg = C * n / (2.0 * n_neg)
    else:
        c_pos = c_neg = C
    box = np.where(y > 0, c_pos, c_neg)

    K = rbf_kernel(X, X, gamma)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective
    eps = 1e-12
    pos = y > 0
    it = 0
    m_val = big_m = 0.0
    while it < max_iter:
        yg = -y * grad  # equals y_i - u_i
        up = (pos & (alpha < box - eps)) | (~pos & (alpha > eps))
        low = (pos & (alpha > eps)) | (~pos & (alpha < box - eps))
        if not up.any() or not low.any():
            break
        yg_up = np.where(up, yg, -np.inf)
        yg_low = np.where(low, yg, np.inf)
        i = int(np.argmax(yg_up))
        j = int(np.argmin(yg_low))
        m_val = yg_up[i]
        big_m = yg_low[j]
        if m_val - big_m < tol:
            break
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0.0:
            quad = 1e-12
        delta = (m_val - big_m) / quad
        bound_i = (box[i] - alpha[i]) if y[i] > 0 else alpha[i]
        bound_j = alpha[j] if y[j] > 0 else (box[j] - alpha[j])
        delta = min(delta, bound_i, bound_j)
        alpha[i] += y[i] * delta
        alpha[j] -= y[j] * delta
        grad += delta * y * (K[:, i] - K[:, j])
        it += 1
    if it >= max_iter:
        warnings.warn(f"SMO stopped at max_iter={max_iter} before KKT tolerance")
        yg = -y * grad
        up = (pos & (alpha < box - eps)) | (~pos & (alpha > eps))
        low = (pos & (alpha > eps)) | (~pos & (alpha < box - eps))
        m_val = np.where(up, yg, -np.inf).max()
        big_m = np.where(low, yg, np.inf).min()

    bias = (m_val + big_m) / 2.0 if np.isfinite(m_val) and np.isfinite(big_m) else 0.0
    dual_obj = float(0.5 * (alpha @ grad) - 0.5 * alpha.sum())
    sv_mask = alpha > eps
    return SvmModel(
        support_vectors=X[sv_mask],
        alpha_y=(alpha * y)[sv_mask],
        bias=float(bias),
        gamma=float(gamma),
        C=float(C),
        c_pos=float(c_pos),
        c_neg=float(c_neg),
        dual_objective=dual_obj,
        n_iter=it,
    )


def decision_function(model: SvmModel, X) -> np.ndarray:
    """sum_i alpha_i y_i K(sv_i, x) + b for each row of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    if X.shape[0] == 0:
        return np.empty(0)
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"feature count {X.shape[1]} does not match model "
            f"dimension {model.support_vectors.shape[1]}"
        )
    return rbf_kernel(X, model.support_vectors, model.gamma) @ model.alpha_y + model.bias


def svm_predict(model: SvmModel, X) -> np.ndarray:
    """Boolean tumour labels; a decision value of exactly 0 is non-tumour."""
    return decision_function(model, X) > 0.0


def grid_search_train(
    X,
    labels,
    C_grid=(1.0, 10.0, 100.0),
    gamma_scale_grid=(0.01, 0.1, 1.0),
    folds: int = 3,
    seed: int = 0,
    balanced: bool = True,
    tol: float = 1e-3,
) -> SvmModel:
    """3-fold cross-validated choice of (C, gamma), then a final refit.

    gamma candidates are the given scales divided by the feature count.
    Deterministic given the seed; ties keep the earliest grid entry.
    """
    X = np.asarray(X, dtype=np.float64)
    y = _as_signed_labels(labels)
    n, d = X.shape
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % folds
    best = None
    for C in C_grid:
        for g_scale in gamma_scale_grid:
            gamma = g_scale / d
            correct = 0
            usable = 0
            for f in range(folds):
                tr = fold_of != f
                te = ~tr
                if len(np.unique(y[tr])) < 2 or not te.any():
                    continue
                model = svm_train(
                    X[tr], y[tr] > 0, C=C, gamma=gamma, tol=tol, balanced=balanced
                )
                pred = svm_predict(model, X[te])
                correct += int((pred == (y[te] > 0)).sum())
                usable += int(te.sum())
            score = correct / usable if usable else 0.0
            if best is None or score > best[0]:
                best = (score, C, gamma)
    _, C, gamma = best
    return svm_train(X, y > 0, C=C, gamma=gamma, tol=tol, balanced=balanced)
