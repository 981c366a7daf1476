from __future__ import annotations

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from tensorcore_module.tensor import ShapeError, Tensor, constant, make_result


Operand = Union[Tensor, float, int, np.ndarray]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    return grad.sum(axis=axes, keepdims=True).reshape(shape)


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}") from exc


def sigmoid(x: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -x))


# ---- binary ops ----

def add(a: Operand, b: Operand) -> Tensor:
    a, b = constant(a), constant(b)
    _broadcast_shape(a, b, "add")
    return make_result(
        a.data + b.data, (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
        "add",
    )


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = constant(a), constant(b)
    _broadcast_shape(a, b, "sub")
    return make_result(
        a.data - b.data, (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
        "sub",
    )


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = constant(a), constant(b)
    _broadcast_shape(a, b, "mul")
    return make_result(
        a.data * b.data, (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
        "mul",
    )


def div(a: Operand, b: Operand) -> Tensor:
    a, b = constant(a), constant(b)
    _broadcast_shape(a, b, "div")
    out = a.data / b.data
    return make_result(
        out, (a, b),
        lambda g: (_unbroadcast(g / b.data, a.shape), _unbroadcast(-g * out / b.data, b.shape)),
        "div",
    )


def scale(a: Tensor, factor: float) -> Tensor:
    factor = float(factor)
    return make_result(a.data * factor, (a,), lambda g: (g * factor,), "scale")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    a, b = constant(a), constant(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: {a.shape} @ {b.shape}")
    return make_result(a.data @ b.data, (a, b), lambda g: (g @ b.data.T, a.data.T @ g), "matmul")


def transpose(a: Tensor) -> Tensor:
    return make_result(a.data.T.copy(), (a,), lambda g: (g.T,), "transpose")


def concat_cols(*tensors: Tensor) -> Tensor:
    if not tensors:
        raise ShapeError("concat_cols needs at least one tensor")
    rows = {t.shape[0] for t in tensors}
    if len(rows) != 1:
        raise ShapeError(f"concat_cols: row counts differ {[t.shape for t in tensors]}")
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])

    def grad_fn(g: np.ndarray):
        return tuple(g[:, bounds[i]:bounds[i + 1]] for i in range(len(tensors)))

    return make_result(np.concatenate([t.data for t in tensors], axis=1), tensors, grad_fn, "concat_cols")


# ---- indexing ----

class RowMeanIndex:
    """Precomputed index for averaging a subset of source rows into each output row."""

    def __init__(self, index_sets: Sequence[Sequence[int]]):
        self.num_rows = len(index_sets)
        targets, sources, weights = [], [], []
        for r, members in enumerate(index_sets):
            if not members:
                continue
            w = 1.0 / len(members)
            for c in members:
                targets.append(r)
                sources.append(int(c))
                weights.append(w)
        self.targets = np.asarray(targets, dtype=np.int64)
        self.sources = np.asarray(sources, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)[:, None]

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.num_rows, x.shape[1]))
        np.add.at(out, self.targets, x[self.sources] * self.weights)
        return out

    def adjoint(self, g: np.ndarray, num_source_rows: int) -> np.ndarray:
        out = np.zeros((num_source_rows, g.shape[1]))
        np.add.at(out, self.sources, g[self.targets] * self.weights)
        return out


def row_mean_subset(x: Tensor, index: Union[RowMeanIndex, Sequence[Sequence[int]]]) -> Tensor:
    """Row r of the result is the mean of x over index[r]; an empty set gives a zero row."""
    if not isinstance(index, RowMeanIndex):
        index = RowMeanIndex(index)
    if index.sources.size and index.sources.max() >= x.shape[0]:
        raise ShapeError(f"row_mean_subset: index {index.sources.max()} out of range for {x.shape[0]} rows")
    n_src = x.shape[0]
    return make_result(index.apply(x.data), (x,), lambda g: (index.adjoint(g, n_src),), "row_mean_subset")


def gather_rows(x: Tensor, idx) -> Tensor:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= x.shape[0]):
        raise ShapeError(f"gather_rows: index out of range for {x.shape[0]} rows")

    def grad_fn(g: np.ndarray):
        out = np.zeros_like(x.data)
        np.add.at(out, idx, g)
        return (out,)

    return make_result(x.data[idx], (x,), grad_fn, "gather_rows")


def gather_cols(x: Tensor, idx) -> Tensor:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= x.shape[1]):
        raise ShapeError(f"gather_cols: index out of range for {x.shape[1]} columns")

    def grad_fn(g: np.ndarray):
        out = np.zeros_like(x.data)
        np.add.at(out, (slice(None), idx), g)
        return (out,)

    return make_result(x.data[:, idx], (x,), grad_fn, "gather_cols")


def block_sum_cols(x: Tensor, width: int) -> Tensor:
    """Sum each run of `width` consecutive columns: (n, m*width) -> (n, m)."""
    rows, cols = x.shape
    if width < 1 or cols % width:
        raise ShapeError(f"block_sum_cols: {cols} columns not divisible by {width}")
    out = x.data.reshape(rows, cols // width, width).sum(axis=2)
    return make_result(out, (x,), lambda g: (np.repeat(g, width, axis=1),), "block_sum_cols")


# ---- elementwise ----

def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    return make_result(y, (x,), lambda g: (g * (1.0 - y * y),), "tanh")


def silu(x: Tensor) -> Tensor:
    s = sigmoid(x.data)
    return make_result(x.data * s, (x,), lambda g: (g * s * (1.0 + x.data * (1.0 - s)),), "silu")


def sin(x: Tensor) -> Tensor:
    return make_result(np.sin(x.data), (x,), lambda g: (g * np.cos(x.data),), "sin")


def cos(x: Tensor) -> Tensor:
    return make_result(np.cos(x.data), (x,), lambda g: (-g * np.sin(x.data),), "cos")


def exp(x: Tensor) -> Tensor:
    y = np.exp(x.data)
    return make_result(y, (x,), lambda g: (g * y,), "exp")


def abs(x: Tensor) -> Tensor:  # noqa: A001 - mirrors numpy naming
    return make_result(np.abs(x.data), (x,), lambda g: (g * np.sign(x.data),), "abs")


def square(x: Tensor) -> Tensor:
    return make_result(x.data * x.data, (x,), lambda g: (2.0 * g * x.data,), "square")


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return make_result(np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,), "relu")


def softplus(x: Tensor) -> Tensor:
    return make_result(np.logaddexp(0.0, x.data), (x,), lambda g: (g * sigmoid(x.data),), "softplus")


# ---- reductions ----

def reduce_sum(x: Tensor, axis: Optional[int] = None) -> Tensor:
    if axis is None:
        out = np.array([[x.data.sum()]])
    else:
        out = x.data.sum(axis=axis, keepdims=True)
    return make_result(out, (x,), lambda g: (np.broadcast_to(g, x.shape).copy(),), "reduce_sum")


def reduce_mean(x: Tensor, axis: Optional[int] = None) -> Tensor:
    count = x.data.size if axis is None else x.shape[axis]
    return scale(reduce_sum(x, axis), 1.0 / count)


def softmax_rows(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=1, keepdims=True)
    return make_result(y, (x,), lambda g: (y * (g - (g * y).sum(axis=1, keepdims=True)),), "softmax_rows")


def log_softmax_rows(x: Tensor) -> Tensor:
    m = x.data.max(axis=1, keepdims=True)
    lse = m + np.log(np.exp(x.data - m).sum(axis=1, keepdims=True))
    y = x.data - lse
    p = np.exp(y)
    return make_result(y, (x,), lambda g: (g - p * g.sum(axis=1, keepdims=True),), "log_softmax_rows")


def normalize_rows(x: Tensor) -> Tensor:
    """Scale every nonzero row to unit L2 norm; zero rows stay zero."""
    norms = np.sqrt((x.data * x.data).sum(axis=1, keepdims=True))
    nonzero = norms > 0
    safe = np.where(nonzero, norms, 1.0)
    y = np.where(nonzero, x.data / safe, 0.0)

    def grad_fn(g: np.ndarray):
        return (np.where(nonzero, (g - y * (g * y).sum(axis=1, keepdims=True)) / safe, 0.0),)

    return make_result(y, (x,), grad_fn, "normalize_rows")
