from __future__ import annotations

from typing import Tuple

import numpy as np

from constants_module.constants import SVD_OVERSAMPLES


def range_finder(a: np.ndarray, size: int, iters: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis (n x size) approximating the range of `a`, refined by power iterations."""
    omega = rng.standard_normal((a.shape[1], size))
    q, _ = np.linalg.qr(a @ omega)
    for _ in range(iters):
        q, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ q)
    return q


def _flip_signs(u: np.ndarray, vt: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if u.size == 0:
        return u, vt
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivots, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


def randomized_svd(a: np.ndarray, k: int, iters: int = 10, seed: int = 42) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    n = min(a.shape)
    if k > n:
        raise ValueError(f"truncated_svd: k={k} exceeds matrix size {n}")
    if k < 1:
        raise ValueError(f"truncated_svd: k must be >= 1, got {k}")
    if iters < 0:
        raise ValueError(f"truncated_svd: iters must be >= 0, got {iters}")

    rng = np.random.default_rng(seed)
    q = range_finder(a, k + min(SVD_OVERSAMPLES, n - k), iters, rng)
    u_small, s, vt = np.linalg.svd(q.T @ a, full_matrices=False)
    u, vt = _flip_signs(q @ u_small[:, :k], vt[:k])
    return u, s[:k], vt


def truncated_svd(a: np.ndarray, k: int, iters: int = 10, seed: int = 42) -> np.ndarray:
    """U_k * Sigma_k of a randomized truncated SVD; deterministic for a given seed."""
    u, s, _ = randomized_svd(a, k, iters, seed)
    return u * s
