from __future__ import annotations

from typing import List, Optional
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from constants_module.constants import KMEANS_MAX_ITER, KMEANS_TOL, SEED
from graphstore_module.graphstore import SignedGraph
from tensorcore_module.tensor import ShapeError


logger = logging.getLogger(__name__)


class ClusterAssignment(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    labels: np.ndarray
    k: int = Field(ge=1)
    inertia: float = Field(ge=0.0)
    centroids: np.ndarray
    iterations: int = 0
    inertia_history: List[float] = Field(default_factory=list)


class ClusterQuality(BaseModel):
    pos_in: float = Field(ge=0.0, le=1.0)
    neg_out: float = Field(ge=0.0, le=1.0)
    q: float = Field(ge=0.0, le=2.0)
    pos_within: int = 0
    pos_between: int = 0
    neg_within: int = 0
    neg_between: int = 0
    # set when a component had no edges and took the vacuous value 1
    pos_in_vacuous: bool = False
    neg_out_vacuous: bool = False


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def kmeanspp_seeds(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(0, n))]
    closest = _squared_distances(points, points[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every remaining point coincides with a centroid
            remaining = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(remaining))
        chosen.append(idx)
        closest = np.minimum(closest, _squared_distances(points, points[idx:idx + 1])[:, 0])
    return points[chosen].copy()


def kmeanspp(
    points: np.ndarray,
    k: int,
    seed: int = SEED,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_TOL,
) -> ClusterAssignment:
    """Kmeans++ seeding followed by Lloyd iterations."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ShapeError(f"kmeanspp expects an n x d matrix, got shape {points.shape}")
    n = points.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"kmeanspp: K={k} must be in [1, {n}]")

    rng = np.random.default_rng(seed)
    centroids = kmeanspp_seeds(points, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    history: List[float] = []
    iteration = 0
    for iteration in range(1, max_iter + 1):
        dist = _squared_distances(points, centroids)
        new_labels = dist.argmin(axis=1)
        point_cost = dist[np.arange(n), new_labels]
        history.append(float(point_cost.sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

        updated = centroids.copy()
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c]:
                updated[c] = points[labels == c].mean(axis=0)
        for c in np.flatnonzero(counts == 0):
            far = int(point_cost.argmax())
            logger.warning("kmeans_empty_cluster cluster=%s reseeded_from=%s", c, far)
            updated[c] = points[far]
            point_cost[far] = 0.0
        shift = float(np.sqrt(((updated - centroids) ** 2).sum(axis=1)).max())
        centroids = updated
        if shift < tol:
            dist = _squared_distances(points, centroids)
            labels = dist.argmin(axis=1)
            history.append(float(dist[np.arange(n), labels].sum()))
            break

    inertia = history[-1]
    return ClusterAssignment(
        labels=labels,
        k=k,
        inertia=max(inertia, 0.0),
        centroids=centroids,
        iterations=iteration,
        inertia_history=history,
    )


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return None if denominator == 0 else numerator / denominator


def cluster_quality(g: SignedGraph, labels) -> ClusterQuality:
    """pos_in = positive edges inside clusters / positive edges; neg_out = negative edges across clusters / negative edges."""
    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ShapeError(f"cluster_quality: {labels.shape[0] if labels.ndim else 0} labels for {g.n} nodes")
    same = labels[g.edges[:, 0]] == labels[g.edges[:, 1]]
    positive = g.edges[:, 2] > 0
    pos_within = int((same & positive).sum())
    pos_between = int((~same & positive).sum())
    neg_within = int((same & ~positive).sum())
    neg_between = int((~same & ~positive).sum())

    pos_in = _ratio(pos_within, pos_within + pos_between)
    neg_out = _ratio(neg_between, neg_within + neg_between)
    if pos_in is None:
        logger.warning("cluster_quality_vacuous component=pos_in reason=no_positive_edges")
    if neg_out is None:
        logger.warning("cluster_quality_vacuous component=neg_out reason=no_negative_edges")
    pos_value = 1.0 if pos_in is None else pos_in
    neg_value = 1.0 if neg_out is None else neg_out
    return ClusterQuality(
        pos_in=pos_value,
        neg_out=neg_value,
        q=pos_value + neg_value,
        pos_within=pos_within,
        pos_between=pos_between,
        neg_within=neg_within,
        neg_between=neg_between,
        pos_in_vacuous=pos_in is None,
        neg_out_vacuous=neg_out is None,
    )
