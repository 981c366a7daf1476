from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union
import logging

import numpy as np

from constants_module.constants import CLASS_NEGATIVE, CLASS_NONE, CLASS_POSITIVE
from graphstore_module.graphstore import SignedGraph
from sgcn_module.model import GraphAggregator, ModelState, embed_tensor
from tensorcore_module import ops
from tensorcore_module.tensor import ShapeError, Tensor


logger = logging.getLogger(__name__)

_REJECTION_ROUNDS = 64


@dataclass(frozen=True)
class TrainSample:
    """Pairs for the 3-class classifier plus (i, j, k) triples for the margin term.

    ce_pairs/ce_labels: (P, 2) node pairs with class ids {positive, negative, none}.
    margin_pos: (i, j+, k) with (i, j) a positive edge and k non-adjacent to i.
    margin_neg: (i, j-, k) with (i, j) a negative edge and k non-adjacent to i.
    """

    ce_pairs: np.ndarray
    ce_labels: np.ndarray
    margin_pos: np.ndarray
    margin_neg: np.ndarray

    def __post_init__(self) -> None:
        if self.ce_pairs.shape[0] != self.ce_labels.shape[0]:
            raise ShapeError(f"{self.ce_pairs.shape[0]} pairs but {self.ce_labels.shape[0]} labels")

    @property
    def num_pairs(self) -> int:
        return int(self.ce_pairs.shape[0])

    @property
    def num_triples(self) -> int:
        return int(self.margin_pos.shape[0] + self.margin_neg.shape[0])


def _edge_keys(g: SignedGraph) -> np.ndarray:
    # edges are sorted by (u, v) with u < v, so the keys come out sorted
    return g.edges[:, 0] * g.n + g.edges[:, 1]


def _adjacent(keys: np.ndarray, n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    pair_key = lo * n + hi
    if keys.size == 0:
        return np.zeros(pair_key.shape, dtype=bool)
    pos = np.clip(np.searchsorted(keys, pair_key), 0, keys.size - 1)
    return keys[pos] == pair_key


def _all_non_edges(g: SignedGraph) -> np.ndarray:
    u, v = np.triu_indices(g.n, k=1)
    mask = ~_adjacent(_edge_keys(g), g.n, u, v)
    return np.stack([u[mask], v[mask]], axis=1).astype(np.int64)


def sample_non_edges(g: SignedGraph, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` unordered non-adjacent pairs drawn uniformly with replacement."""
    total = g.n * (g.n - 1) // 2
    available = total - g.num_edges
    if count <= 0 or available <= 0:
        return np.zeros((0, 2), dtype=np.int64)
    if 2 * available < total:
        pool = _all_non_edges(g)
        return pool[rng.integers(0, pool.shape[0], size=count)]

    keys = _edge_keys(g)
    found = np.zeros((0, 2), dtype=np.int64)
    while found.shape[0] < count:
        need = count - found.shape[0]
        u = rng.integers(0, g.n, size=2 * need)
        v = rng.integers(0, g.n, size=2 * need)
        ok = (u != v) & ~_adjacent(keys, g.n, u, v)
        batch = np.stack([np.minimum(u, v), np.maximum(u, v)], axis=1)[ok]
        found = np.concatenate([found, batch[:need]])
    return found


def sample_non_neighbors(g: SignedGraph, anchors: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One k per anchor with k != anchor and (anchor, k) not an edge; -1 where the anchor has no non-neighbor."""
    keys = _edge_keys(g)
    result = np.full(anchors.shape[0], -1, dtype=np.int64)
    pending = np.flatnonzero(g.n - 1 - g.degrees[anchors] > 0)
    for _ in range(_REJECTION_ROUNDS):
        if pending.size == 0:
            return result
        k = rng.integers(0, g.n, size=pending.size)
        ok = (k != anchors[pending]) & ~_adjacent(keys, g.n, anchors[pending], k)
        result[pending[ok]] = k[ok]
        pending = pending[~ok]
    for idx in pending:
        i = int(anchors[idx])
        candidates = np.setdiff1d(np.arange(g.n), np.fromiter(g.neighbor_sets[i] | {i}, dtype=np.int64))
        result[idx] = candidates[rng.integers(0, candidates.size)]
    return result


def _triples(g: SignedGraph, edges: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if edges.shape[0] == 0:
        return np.zeros((0, 3), dtype=np.int64)
    k = sample_non_neighbors(g, edges[:, 0], rng)
    keep = k >= 0
    return np.column_stack([edges[keep], k[keep]]).astype(np.int64)


def sample_training_pairs(
    g: SignedGraph,
    rng: np.random.Generator,
    margin_rng: Optional[np.random.Generator] = None,
) -> TrainSample:
    pos, neg = g.pos_edges.astype(np.int64), g.neg_edges.astype(np.int64)
    none = sample_non_edges(g, pos.shape[0], rng)
    pairs = np.concatenate([pos, neg, none]).reshape(-1, 2)
    labels = np.concatenate([
        np.full(pos.shape[0], CLASS_POSITIVE),
        np.full(neg.shape[0], CLASS_NEGATIVE),
        np.full(none.shape[0], CLASS_NONE),
    ]).astype(np.int64)
    margin_rng = margin_rng or rng
    return TrainSample(pairs, labels, _triples(g, pos, margin_rng), _triples(g, neg, margin_rng))


def pair_logits(z: Tensor, pairs: np.ndarray, classifier_weight: Tensor, classifier_bias: Tensor) -> Tensor:
    features = ops.concat_cols(ops.gather_rows(z, pairs[:, 0]), ops.gather_rows(z, pairs[:, 1]))
    return ops.add(ops.matmul(features, classifier_weight), classifier_bias)


def _squared_distance(z: Tensor, a: np.ndarray, b: np.ndarray) -> Tensor:
    diff = ops.sub(ops.gather_rows(z, a), ops.gather_rows(z, b))
    return ops.reduce_sum(ops.square(diff), axis=1)


def cross_entropy(z: Tensor, sample: TrainSample, classifier_weight: Tensor, classifier_bias: Tensor) -> Tensor:
    logp = ops.log_softmax_rows(pair_logits(z, sample.ce_pairs, classifier_weight, classifier_bias))
    onehot = np.zeros(logp.shape)
    onehot[np.arange(sample.num_pairs), sample.ce_labels] = 1.0
    return ops.scale(ops.reduce_sum(ops.mul(logp, Tensor(onehot))), -1.0 / sample.num_pairs)


def margin_term(z: Tensor, sample: TrainSample) -> Optional[Tensor]:
    """Mean hinge over triples: positives closer than non-neighbors, non-neighbors closer than negatives.

    Both triple kinds are pooled into one mean, sum of all hinges / num_triples, rather than averaged per kind.
    """
    total: Optional[Tensor] = None
    if sample.margin_pos.shape[0]:
        i, j, k = sample.margin_pos.T
        hinge = ops.relu(ops.sub(_squared_distance(z, i, j), _squared_distance(z, i, k)))
        total = ops.reduce_sum(hinge)
    if sample.margin_neg.shape[0]:
        i, j, k = sample.margin_neg.T
        hinge = ops.reduce_sum(ops.relu(ops.sub(_squared_distance(z, i, k), _squared_distance(z, i, j))))
        total = hinge if total is None else ops.add(total, hinge)
    if total is None:
        return None
    return ops.scale(total, 1.0 / sample.num_triples)


def loss(
    embeddings: Tensor,
    sample: TrainSample,
    classifier_weight: Tensor,
    classifier_bias: Tensor,
    lamb: float,
) -> Tensor:
    if sample.num_pairs == 0:
        raise ValueError("loss needs a nonempty training sample")
    if classifier_weight.shape != (2 * embeddings.shape[1], 3):
        raise ShapeError(f"classifier weight {classifier_weight.shape} does not match embeddings {embeddings.shape}")
    value = cross_entropy(embeddings, sample, classifier_weight, classifier_bias)
    if lamb == 0:
        return value
    margin = margin_term(embeddings, sample)
    return value if margin is None else ops.add(value, ops.scale(margin, lamb))


def model_loss(
    state: ModelState,
    g: Union[SignedGraph, GraphAggregator],
    h0: Tensor,
    sample: TrainSample,
    lamb: float,
) -> Tensor:
    z = embed_tensor(state, g, h0)
    return loss(z, sample, state.classifier_weight, state.classifier_bias, lamb)
