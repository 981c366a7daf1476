from __future__ import annotations

from pathlib import Path
from typing import Dict, Mapping, Union
import logging

import numpy as np

from tensorcore_module.tensor import ShapeError, Tensor


logger = logging.getLogger(__name__)

TensorLike = Union[Tensor, np.ndarray]


def save_named_tensors(path: str | Path, tensors: Mapping[str, TensorLike]) -> Path:
    """Write {name: f64 matrix} as an .npz archive; names and shapes round-trip exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {name: np.asarray(t.data if isinstance(t, Tensor) else t, dtype=np.float64) for name, t in tensors.items()}
    with path.open("wb") as fh:
        np.savez(fh, **payload)
    logger.info("checkpoint_saved path=%s tensors=%s", path, len(payload))
    return path


def load_named_tensors(path: str | Path) -> Dict[str, np.ndarray]:
    with np.load(Path(path), allow_pickle=False) as archive:
        return {name: archive[name].astype(np.float64) for name in archive.files}


def load_into(params: Mapping[str, Tensor], path: str | Path) -> None:
    loaded = load_named_tensors(path)
    missing = sorted(set(params) - set(loaded))
    if missing:
        raise KeyError(f"Checkpoint {path} is missing tensors: {missing}")
    for name, tensor in params.items():
        if loaded[name].shape != tensor.data.shape:
            raise ShapeError(f"Checkpoint tensor {name} has shape {loaded[name].shape}, expected {tensor.data.shape}")
        tensor.data[...] = loaded[name]
