from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple
import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from constants_module.constants import LOGREG_GRAD_TOL, LOGREG_L2, LOGREG_MAX_ITER, NEGATIVE, POSITIVE, SEED
from graphstore_module.graphstore import EdgeSplit
from tensorcore_module.tensor import ShapeError


logger = logging.getLogger(__name__)


def edge_features(emb: np.ndarray, edges) -> np.ndarray:
    """Row for (u, v) is [z_u, z_v]."""
    edges = np.atleast_2d(np.asarray(edges, dtype=np.int64))
    pairs = edges[:, :2] if edges.size else np.zeros((0, 2), dtype=np.int64)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= emb.shape[0]):
        raise IndexError(f"edge endpoint out of range for {emb.shape[0]} embeddings")
    return np.concatenate([emb[pairs[:, 0]], emb[pairs[:, 1]]], axis=1)


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: np.ndarray
    classes: np.ndarray
    iterations: int
    converged: bool

    @property
    def positive_column(self) -> int:
        return int(np.flatnonzero(self.classes == POSITIVE)[0])


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
    return shifted / shifted.sum(axis=1, keepdims=True)


def logreg_objective(model: LogisticModel, features: np.ndarray, labels: np.ndarray, l2: float = LOGREG_L2) -> float:
    probs = predict_proba(model, features)
    cols = np.searchsorted(model.classes, labels)
    ce = -np.log(np.clip(probs[np.arange(labels.size), cols], 1e-300, None)).mean()
    return float(ce + 0.5 * l2 * (model.weights ** 2).sum())


def logreg_fit(
    features: np.ndarray,
    labels,
    seed: int = SEED,
    l2: float = LOGREG_L2,
    max_iter: int = LOGREG_MAX_ITER,
    tol: float = LOGREG_GRAD_TOL,
) -> LogisticModel:
    """Multinomial logistic regression by full-batch gradient descent from zero weights.

    Step size is the inverse smoothness bound of the penalized objective, so the fit is deterministic
    and `seed` is accepted only for interface symmetry with the other estimators.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    if features.ndim != 2 or features.shape[0] != labels.shape[0]:
        raise ShapeError(f"logreg_fit: {features.shape} features for {labels.shape} labels")
    classes = np.unique(labels)
    if classes.size < 2:
        raise ValueError(f"logreg_fit needs at least two classes, got {classes.tolist()}")

    n, d = features.shape
    onehot = (labels[:, None] == classes[None, :]).astype(np.float64)
    augmented = np.hstack([features, np.ones((n, 1))])
    sigma_max = np.linalg.norm(augmented, ord=2)
    step = 1.0 / (0.5 * sigma_max ** 2 / n + l2)

    weights = np.zeros((d, classes.size))
    bias = np.zeros(classes.size)
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        residual = (_softmax(features @ weights + bias) - onehot) / n
        grad_w = features.T @ residual + l2 * weights
        grad_b = residual.sum(axis=0)
        if np.sqrt((grad_w ** 2).sum() + (grad_b ** 2).sum()) < tol:
            converged = True
            break
        weights -= step * grad_w
        bias -= step * grad_b
    logger.debug("logreg_fit samples=%s iterations=%s converged=%s", n, iteration, converged)
    return LogisticModel(weights, bias, classes, iteration, converged)


def predict_proba(model: LogisticModel, features: np.ndarray) -> np.ndarray:
    return _softmax(np.asarray(features, dtype=np.float64) @ model.weights + model.bias)


def predict(model: LogisticModel, features: np.ndarray) -> np.ndarray:
    return model.classes[predict_proba(model, features).argmax(axis=1)]


def auc(scores, labels, positive_class: int = POSITIVE) -> float:
    """Mann-Whitney AUC from average ranks, so tied scores count one half."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    is_pos = np.asarray(labels).ravel() == positive_class
    n_pos = int(is_pos.sum())
    n_neg = int(is_pos.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("auc needs both classes in labels")
    ranks = pd.Series(scores).rank(method="average").to_numpy()
    return float((ranks[is_pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def precision_recall_f1(predictions, labels, positive_class: int = POSITIVE) -> Tuple[float, float, float]:
    predictions = np.asarray(predictions).ravel()
    labels = np.asarray(labels).ravel()
    tp = int(((predictions == positive_class) & (labels == positive_class)).sum())
    fp = int(((predictions == positive_class) & (labels != positive_class)).sum())
    fn = int(((predictions != positive_class) & (labels == positive_class)).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall, harmonic_f1(precision, recall)


def harmonic_f1(precision: float, recall: float) -> float:
    return 0.0 if precision + recall == 0 else 2.0 * precision * recall / (precision + recall)


def f1(predictions, labels, positive_class: int = POSITIVE) -> float:
    return precision_recall_f1(predictions, labels, positive_class)[2]


class LinkSignReport(BaseModel):
    auc: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    precision: Dict[str, float]
    recall: Dict[str, float]
    train_edges: int = 0
    test_edges: int = 0

    def f1_consistent(self, tol: float = 1e-12) -> bool:
        return abs(self.f1 - harmonic_f1(self.precision["positive"], self.recall["positive"])) <= tol


def evaluate_link_sign(emb: np.ndarray, split: EdgeSplit, seed: int = SEED, model: Optional[LogisticModel] = None) -> LinkSignReport:
    """Fit on the train edges' signs, score the held-out edges."""
    train_x = edge_features(emb, split.train_edges)
    test_x = edge_features(emb, split.test_edges)
    train_y = split.train_edges[:, 2]
    test_y = split.test_edges[:, 2]
    for name, cls in (("positive", POSITIVE), ("negative", NEGATIVE)):
        if not (test_y == cls).any():
            raise ValueError(f"evaluate_link_sign: no {name} edges in the test split, AUC is undefined")
    model = model or logreg_fit(train_x, train_y, seed=seed)
    probs = predict_proba(model, test_x)[:, model.positive_column]
    predicted = predict(model, test_x)

    precision: Dict[str, float] = {}
    recall: Dict[str, float] = {}
    for name, cls in (("positive", POSITIVE), ("negative", NEGATIVE)):
        precision[name], recall[name], _ = precision_recall_f1(predicted, test_y, cls)
    report = LinkSignReport(
        auc=auc(probs, test_y),
        f1=f1(predicted, test_y, POSITIVE),
        precision=precision,
        recall=recall,
        train_edges=int(train_y.size),
        test_edges=int(test_y.size),
    )
    logger.info("linksign_scored auc=%.4f f1=%.4f test_edges=%s", report.auc, report.f1, report.test_edges)
    return report
