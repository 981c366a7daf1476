from __future__ import annotations

import logging

import numpy as np

from constants_module.constants import REDUCTION_DIMENSIONS, REDUCTION_ITERATIONS, SEED
from graphstore_module.graphstore import SignedGraph
from tensorcore_module.svd import truncated_svd


logger = logging.getLogger(__name__)


def normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    return np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)


def init_features(
    g: SignedGraph,
    dims: int = REDUCTION_DIMENSIONS,
    iters: int = REDUCTION_ITERATIONS,
    seed: int = SEED,
    norm: bool = True,
    spectral: bool = True,
) -> np.ndarray:
    """Initial node features h0: U_k * Sigma_k of the signed adjacency, rows optionally L2-normalized."""
    if spectral:
        features = truncated_svd(g.signed_adjacency(), dims, iters, seed)
    else:
        if dims > g.n:
            raise ValueError(f"truncated_svd: k={dims} exceeds matrix size {g.n}")
        features = np.random.default_rng(seed).standard_normal((g.n, dims))
    if norm:
        features = normalize_rows(features)
    logger.debug("features_initialized nodes=%s dims=%s spectral=%s", g.n, dims, spectral)
    return features
