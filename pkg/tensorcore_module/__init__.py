from tensorcore_module.optim import AdamConfig, AdamState, adam_step
from tensorcore_module.svd import randomized_svd, range_finder, truncated_svd
from tensorcore_module.tensor import NonFiniteError, ShapeError, Tape, Tensor, backward


__all__ = [
    "AdamConfig",
    "AdamState",
    "NonFiniteError",
    "ShapeError",
    "Tape",
    "Tensor",
    "adam_step",
    "backward",
    "randomized_svd",
    "range_finder",
    "truncated_svd",
]
