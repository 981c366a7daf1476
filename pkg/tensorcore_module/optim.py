from __future__ import annotations

from typing import Dict, Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from constants_module.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, LEARNING_RATE, WEIGHT_DECAY
from tensorcore_module.tensor import ShapeError, Tensor, check_finite


class AdamConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(default=LEARNING_RATE, ge=0.0)
    weight_decay: float = Field(default=WEIGHT_DECAY, ge=0.0)
    beta1: float = Field(default=ADAM_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(default=ADAM_BETA2, ge=0.0, lt=1.0)
    eps: float = Field(default=ADAM_EPS, gt=0.0)


class AdamState:
    """First/second moments per named parameter plus the shared step counter."""

    def __init__(self, params: Mapping[str, Tensor], config: AdamConfig | None = None):
        self.config = config or AdamConfig()
        self.step = 0
        self.m: Dict[str, np.ndarray] = {name: np.zeros_like(p.data) for name, p in params.items()}
        self.v: Dict[str, np.ndarray] = {name: np.zeros_like(p.data) for name, p in params.items()}


def adam_step(params: Mapping[str, Tensor], grads: Mapping[str, np.ndarray], state: AdamState) -> Mapping[str, Tensor]:
    """One in-place Adam update with decoupled weight decay (applied before the moment update)."""
    cfg = state.config
    state.step += 1
    bias1 = 1.0 - cfg.beta1 ** state.step
    bias2 = 1.0 - cfg.beta2 ** state.step
    for name, param in params.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(param.data)
        if grad.shape != param.data.shape or state.m[name].shape != param.data.shape:
            raise ShapeError(f"adam_step: {name} has shape {param.data.shape}, gradient {grad.shape}")
        if cfg.weight_decay:
            param.data -= cfg.learning_rate * cfg.weight_decay * param.data
        state.m[name] = cfg.beta1 * state.m[name] + (1.0 - cfg.beta1) * grad
        state.v[name] = cfg.beta2 * state.v[name] + (1.0 - cfg.beta2) * grad * grad
        m_hat = state.m[name] / bias1
        v_hat = state.v[name] / bias2
        param.data -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        check_finite(param.data, f"adam_step[{name}]")
    return params
