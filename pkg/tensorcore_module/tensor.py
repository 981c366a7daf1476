from __future__ import annotations

from contextvars import ContextVar, Token
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np


GradFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class ShapeError(ValueError):
    pass


class NonFiniteError(FloatingPointError):
    def __init__(self, op: str):
        self.op = op
        super().__init__(f"Non-finite value produced by {op}")


def check_finite(data: np.ndarray, op: str) -> None:
    if not np.isfinite(data).all():
        raise NonFiniteError(op)


def as_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeError(f"Tensor data must be 2-D, got shape {arr.shape}")
    return arr


class Tensor:
    """Dense row-major f64 matrix that records its producing op while a Tape is active."""

    __slots__ = ("data", "requires_grad", "grad", "name", "_parents", "_grad_fn", "_op")

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.array(as_matrix(data), dtype=np.float64, copy=True)
        check_finite(self.data, name or "tensor")
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: Tuple[Tensor, ...] = ()
        self._grad_fn: Optional[GradFn] = None
        self._op = "leaf"

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]

    @property
    def is_leaf(self) -> bool:
        return self._grad_fn is None

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self._op}{label}, requires_grad={self.requires_grad})"

    # operator sugar; the ops module holds the gradient rules
    def __add__(self, other):
        from tensorcore_module import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from tensorcore_module import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from tensorcore_module import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from tensorcore_module import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from tensorcore_module import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from tensorcore_module import ops
        return ops.mul(other, self)

    def __truediv__(self, other):
        from tensorcore_module import ops
        return ops.div(self, other)

    def __neg__(self):
        from tensorcore_module import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from tensorcore_module import ops
        return ops.matmul(self, other)

    @property
    def T(self) -> "Tensor":
        from tensorcore_module import ops
        return ops.transpose(self)


class Tape:
    """Ordered record of differentiable ops; recording order is a topological order."""

    def __init__(self) -> None:
        self.nodes: List[Tensor] = []
        self._token: Optional[Token] = None

    def __enter__(self) -> "Tape":
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, *exc) -> None:
        if self._token is not None:
            _ACTIVE_TAPE.reset(self._token)
            self._token = None

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, node: Tensor) -> None:
        self.nodes.append(node)

    def clear(self) -> None:
        for node in self.nodes:
            node._parents = ()
            node._grad_fn = None
        self.nodes.clear()


_ACTIVE_TAPE: ContextVar[Optional[Tape]] = ContextVar("active_tape", default=None)


def active_tape() -> Optional[Tape]:
    return _ACTIVE_TAPE.get()


def constant(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def make_result(data: np.ndarray, parents: Sequence[Tensor], grad_fn: GradFn, op: str) -> Tensor:
    check_finite(data, op)
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    out.name = None
    out._op = op
    out._parents = ()
    out._grad_fn = None
    out.requires_grad = False
    tape = _ACTIVE_TAPE.get()
    if tape is not None and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._grad_fn = grad_fn
        tape.record(out)
    return out


def backward(loss: Tensor, tape: Optional[Tape] = None) -> Dict[Tensor, np.ndarray]:
    """Reverse sweep over the tape; returns dLoss/dLeaf for every requires_grad leaf reached."""
    tape = tape or active_tape()
    if tape is None:
        raise RuntimeError("backward needs an active Tape")
    if loss.shape != (1, 1):
        raise ShapeError(f"backward needs a scalar (1x1) root, got {loss.shape}")
    if not tape.nodes:
        raise RuntimeError("backward called on an empty Tape")

    grads: Dict[int, np.ndarray] = {id(loss): np.ones((1, 1))}
    leaves: Dict[int, Tensor] = {}
    for node in reversed(tape.nodes):
        upstream = grads.pop(id(node), None)
        if upstream is None:
            continue
        for parent, contribution in zip(node._parents, node._grad_fn(upstream)):
            if contribution is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = grads[key] + contribution if key in grads else contribution
            if parent.is_leaf:
                leaves[key] = parent

    result: Dict[Tensor, np.ndarray] = {}
    for key, leaf in leaves.items():
        leaf.grad = grads[key]
        result[leaf] = grads[key]
    tape.clear()
    return result
