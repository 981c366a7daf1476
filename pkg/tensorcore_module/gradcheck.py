from __future__ import annotations

from typing import Callable, Dict, Mapping

import numpy as np

from tensorcore_module.tensor import Tape, Tensor, backward


def analytic_gradients(fn: Callable[[], Tensor], params: Mapping[str, Tensor]) -> Dict[str, np.ndarray]:
    with Tape() as tape:
        loss = fn()
        grads = backward(loss, tape)
    return {name: grads.get(p, np.zeros_like(p.data)) for name, p in params.items()}


def numeric_gradients(fn: Callable[[], Tensor], params: Mapping[str, Tensor], eps: float = 1e-5) -> Dict[str, np.ndarray]:
    result: Dict[str, np.ndarray] = {}
    for name, p in params.items():
        grad = np.zeros_like(p.data)
        for idx in np.ndindex(*p.data.shape):
            original = p.data[idx]
            p.data[idx] = original + eps
            plus = fn().item()
            p.data[idx] = original - eps
            minus = fn().item()
            p.data[idx] = original
            grad[idx] = (plus - minus) / (2.0 * eps)
        result[name] = grad
    return result


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


def gradcheck(fn: Callable[[], Tensor], params: Mapping[str, Tensor], eps: float = 1e-5) -> Dict[str, float]:
    """Relative error between backward() and central differences, per parameter."""
    analytic = analytic_gradients(fn, params)
    numeric = numeric_gradients(fn, params, eps)
    return {name: relative_error(analytic[name], numeric[name]) for name in params}
