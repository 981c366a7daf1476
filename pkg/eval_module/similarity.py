from __future__ import annotations

import logging

import numpy as np

from tensorcore_module.tensor import ShapeError


logger = logging.getLogger(__name__)


def avg_cosine_similarity(emb_a: np.ndarray, emb_b: np.ndarray) -> float:
    """Mean over nodes of cos(e_i^A, e_i^B); rows where either side has zero norm are skipped."""
    emb_a = np.asarray(emb_a, dtype=np.float64)
    emb_b = np.asarray(emb_b, dtype=np.float64)
    if emb_a.shape != emb_b.shape:
        raise ShapeError(f"avg_cosine_similarity: shapes {emb_a.shape} and {emb_b.shape} differ")
    norms = np.linalg.norm(emb_a, axis=1) * np.linalg.norm(emb_b, axis=1)
    keep = norms > 0
    skipped = int((~keep).sum())
    if skipped:
        logger.warning("cosine_rows_skipped rows=%s reason=zero_norm", skipped)
    if not keep.any():
        raise ValueError("avg_cosine_similarity: every row has zero norm")
    dots = np.einsum("ij,ij->i", emb_a[keep], emb_b[keep])
    return float((dots / norms[keep]).mean())
