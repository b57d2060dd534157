"""Unsupervised alternatives: Lloyd k-means and fuzzy c-means.

Both run per image on its own feature matrix (no training folds) and map
clusters to tumour/non-tumour by comparing mean values of the distance
feature: the cluster sitting closer to the click is the tumour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ClusterModel:
    method: str  # 'kmeans' | 'fcm'
    centroids: np.ndarray  # (k, d)
    fuzzifier: float = 2.0
    objective_history: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.centroids, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "centroids", c)
        if self.method == "fcm" and self.fuzzifier <= 1.0:
            raise ValueError("fuzzifier must be > 1")

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    d2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centroids[c:] = centroids[0]
            break
        probs = d2 / total
        centroids[c] = X[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, ((X - centroids[c]) ** 2).sum(axis=1))
    return centroids


def kmeans_fit(X, k: int = 2, seed: int = 0, max_iter: int = 300) -> ClusterModel:
    """Lloyd iterations from a seeded k-means++ start.

    Stops when assignments stop changing (or at max_iter). The recorded
    objective history (within-cluster sum of squares after each iteration)
    is nonincreasing; empty clusters keep their previous centroid.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(X, k, rng)
    assign = np.full(n, -1, dtype=np.int64)
    history = []
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        for c in range(k):
            members = new_assign == c
            if members.any():
                centroids[c] = X[members].mean(axis=0)
        wcss = float(((X - centroids[new_assign]) ** 2).sum())
        history.append(wcss)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    return ClusterModel(method="kmeans", centroids=centroids, objective_history=tuple(history))


def kmeans_assign(model: ClusterModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    d2 = ((X[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def fcm_memberships(centroids: np.ndarray, X: np.ndarray, fuzzifier: float) -> np.ndarray:
    """Membership matrix u_ij; rows sum to 1. A point coincident with a
    centroid takes membership 1 there (split evenly over exact ties)."""
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    zero = d2 <= 0.0
    u = np.zeros_like(d2)
    singular = zero.any(axis=1)
    if singular.any():
        z = zero[singular]
        u[singular] = z / z.sum(axis=1, keepdims=True)
    regular = ~singular
    if regular.any():
        power = 1.0 / (fuzzifier - 1.0)
        inv = (1.0 / d2[regular]) ** power
        u[regular] = inv / inv.sum(axis=1, keepdims=True)
    return u


def fcm_fit(
    X,
    c: int = 2,
    fuzzifier: float = 2.0,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-5,
):
    """Alternating membership/centroid updates minimizing
    sum_ij u_ij^m ||x_i - c_j||^2; stops when the largest membership change
    drops below ``tol``. Returns (model, memberships)."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < c:
        raise ValueError(f"need at least c={c} points, got {n}")
    if fuzzifier <= 1.0:
        raise ValueError("fuzzifier must be > 1")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(X, c, rng)
    u = fcm_memberships(centroids, X, fuzzifier)
    history = [_fcm_objective(centroids, X, u, fuzzifier)]
    for _ in range(max_iter):
        um = u**fuzzifier
        denom = um.sum(axis=0)
        nonempty = denom > 0.0
        new_centroids = centroids.copy()
        new_centroids[nonempty] = (um.T[nonempty] @ X) / denom[nonempty, None]
        centroids = new_centroids
        new_u = fcm_memberships(centroids, X, fuzzifier)
        history.append(_fcm_objective(centroids, X, new_u, fuzzifier))
        delta = float(np.abs(new_u - u).max())
        u = new_u
        if delta < tol:
            break
    model = ClusterModel(
        method="fcm",
        centroids=centroids,
        fuzzifier=fuzzifier,
        objective_history=tuple(history),
    )
    return model, u


def _fcm_objective(centroids, X, u, fuzzifier) -> float:
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return float(((u**fuzzifier) * d2).sum())


def clusters_to_labels(model: ClusterModel, X) -> np.ndarray:
    """Map cluster indices to tumour/non-tumour via the distance feature.

    ``X`` must include the distance column (last). The cluster whose members
    have the smaller mean distance is the tumour; on an exact tie, the
    smaller cluster. Invariant under permutation of cluster indices.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    if model.method == "fcm":
        u = fcm_memberships(model.centroids, X, model.fuzzifier)
        assign = u.argmax(axis=1)
    else:
        assign = kmeans_assign(model, X)
    dist = X[:, -1]
    k = model.k
    means = np.full(k, np.inf)
    counts = np.zeros(k, dtype=np.int64)
    for c in range(k):
        members = assign == c
        counts[c] = members.sum()
        if counts[c]:
            means[c] = dist[members].mean()
    best = means.min()
    tied = np.nonzero(means == best)[0]
    if tied.size > 1:
        # fewer members wins the tie
        tumour_cluster = tied[np.argmin(counts[tied])]
    else:
        tumour_cluster = tied[0]
    return assign == tumour_cluster
