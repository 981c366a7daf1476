from __future__ import annotations

from typing import Dict, Literal, Tuple
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from constants_module.constants import (
    BASE_ACTIVATION,
    GRID_EPS,
    GRID_RANGE,
    GRID_SIZE,
    SCALE_BASE,
    SCALE_NOISE,
    SCALE_SPLINE,
    SPLINE_ORDER,
)
from kan_module.bspline import bspline_features, fit_coefficients, make_grid
from tensorcore_module import ops
from tensorcore_module.tensor import ShapeError, Tensor


logger = logging.getLogger(__name__)

KanKind = Literal["bspline", "fourier", "laplace", "wavelet"]

_SOFTPLUS_ONE = math.log(math.e - 1.0)
_grid_eps_warned = False


class KanConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid_size: int = Field(default=GRID_SIZE, ge=1)
    spline_order: int = Field(default=SPLINE_ORDER, ge=0)
    scale_noise: float = Field(default=SCALE_NOISE, ge=0.0)
    scale_base: float = SCALE_BASE
    scale_spline: float = SCALE_SPLINE
    grid_range: Tuple[float, float] = GRID_RANGE
    grid_eps: float = GRID_EPS
    base_activation: Literal["silu"] = BASE_ACTIVATION

    @model_validator(mode="after")
    def _check_range(self) -> "KanConfig":
        if not self.grid_range[0] < self.grid_range[1]:
            raise ValueError(f"grid_range must be increasing, got {self.grid_range}")
        return self


def xavier_uniform(rng: np.random.Generator, out_dim: int, in_dim: int) -> np.ndarray:
    bound = math.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-bound, bound, size=(out_dim, in_dim))


class KanLayer:
    """Learnable map R^in -> R^out: output_j = sum_i phi_ji(x_i)."""

    kind: str = ""

    def __init__(self, in_dim: int, out_dim: int, config: KanConfig):
        if in_dim < 1 or out_dim < 1:
            raise ValueError(f"KAN layer dims must be >= 1, got {in_dim}->{out_dim}")
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.config = config
        self.params: Dict[str, Tensor] = {}

    def parameters(self) -> Dict[str, Tensor]:
        return dict(self.params)

    @property
    def num_parameters(self) -> int:
        return int(sum(p.data.size for p in self.params.values()))

    def _check_input(self, x: Tensor) -> None:
        if x.shape[1] != self.in_dim:
            raise ShapeError(f"{self.kind} KAN layer expects {self.in_dim} columns, got {x.shape[1]}")

    def forward(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def __call__(self, x: Tensor) -> Tensor:
        self._check_input(x)
        return self.forward(x)

    def _param(self, name: str, data: np.ndarray) -> Tensor:
        tensor = Tensor(data, requires_grad=True, name=name)
        self.params[name] = tensor
        return tensor


class BsplineKanLayer(KanLayer):
    """phi(x) = w_b * SiLU(x) + w_s * sum_k c_k B_k(x)."""

    kind = "bspline"

    def __init__(self, in_dim: int, out_dim: int, config: KanConfig, rng: np.random.Generator):
        super().__init__(in_dim, out_dim, config)
        order, size = config.spline_order, config.grid_size
        self.grid = make_grid(size, order, config.grid_range)
        self.num_bases = size + order

        self.base_weight = self._param("base_weight", xavier_uniform(rng, out_dim, in_dim) * config.scale_base)

        # spline part interpolates small noise at the grid points
        points = self.grid[order:len(self.grid) - order]
        noise = (rng.random((points.size, out_dim * in_dim)) - 0.5) * config.scale_noise / size
        coef = fit_coefficients(self.grid, order, points, noise)  # (num_bases, out*in)
        coef = coef.T.reshape(out_dim, in_dim * self.num_bases)
        self.spline_weight = self._param("spline_weight", coef)
        self.spline_scaler = self._param("spline_scaler", np.full((out_dim, in_dim), config.scale_spline))
        self._scaler_cols = np.repeat(np.arange(in_dim), self.num_bases)

    @property
    def spline_coefficients(self) -> np.ndarray:
        return self.spline_weight.data.reshape(self.out_dim, self.in_dim, self.num_bases)

    def forward(self, x: Tensor) -> Tensor:
        base = ops.matmul(ops.silu(x), ops.transpose(self.base_weight))
        bases = bspline_features(x, self.grid, self.config.spline_order)
        scaled = ops.mul(self.spline_weight, ops.gather_cols(self.spline_scaler, self._scaler_cols))
        return ops.add(base, ops.matmul(bases, ops.transpose(scaled)))


class FourierKanLayer(KanLayer):
    """phi(x) = sum_k a_k cos(kx) + b_k sin(kx), plus an output bias."""

    kind = "fourier"

    def __init__(self, in_dim: int, out_dim: int, config: KanConfig, rng: np.random.Generator):
        super().__init__(in_dim, out_dim, config)
        size = config.grid_size
        std = 1.0 / (in_dim * math.sqrt(size))
        self.cos_weight = self._param("cos_weight", rng.normal(0.0, std, size=(out_dim, in_dim * size)))
        self.sin_weight = self._param("sin_weight", rng.normal(0.0, std, size=(out_dim, in_dim * size)))
        self.bias = self._param("bias", np.zeros((1, out_dim)))
        self._cols = np.repeat(np.arange(in_dim), size)
        self._freqs = Tensor(np.tile(np.arange(1, size + 1, dtype=np.float64), in_dim))

    def forward(self, x: Tensor) -> Tensor:
        kx = ops.mul(ops.gather_cols(x, self._cols), self._freqs)
        out = ops.add(
            ops.matmul(ops.cos(kx), ops.transpose(self.cos_weight)),
            ops.matmul(ops.sin(kx), ops.transpose(self.sin_weight)),
        )
        return ops.add(out, self.bias)


class _PerEdgeBasisLayer(KanLayer):
    """Shared layout for bases with per-(j, i, k) shape parameters.

    Columns are ordered (j, i, k) row-major, so a block of in_dim * grid_size columns belongs to output j.
    """

    def __init__(self, in_dim: int, out_dim: int, config: KanConfig, rng: np.random.Generator):
        super().__init__(in_dim, out_dim, config)
        size = config.grid_size
        self.width = out_dim * in_dim * size
        self._cols = np.tile(np.repeat(np.arange(in_dim), size), out_dim)
        std = 1.0 / (in_dim * math.sqrt(size))
        self._amplitude_init = rng.normal(0.0, std, size=(1, self.width))
        # centers / translations start uniformly inside grid_range
        self._position_init = rng.uniform(*config.grid_range, size=(1, self.width))

    def _expanded(self, x: Tensor) -> Tensor:
        return ops.gather_cols(x, self._cols)

    def _reduce(self, values: Tensor) -> Tensor:
        return ops.block_sum_cols(values, self.in_dim * self.config.grid_size)


class LaplaceKanLayer(_PerEdgeBasisLayer):
    """phi(x) = sum_k w_k exp(-lambda_k |x - mu_k|), lambda = softplus(rho) > 0."""

    kind = "laplace"

    def __init__(self, in_dim: int, out_dim: int, config: KanConfig, rng: np.random.Generator):
        super().__init__(in_dim, out_dim, config, rng)
        self.amplitude = self._param("amplitude", self._amplitude_init)
        self.center = self._param("center", self._position_init)
        self.rho = self._param("rho", np.full((1, self.width), _SOFTPLUS_ONE))

    @property
    def inverse_scale(self) -> np.ndarray:
        return np.logaddexp(0.0, self.rho.data)

    def forward(self, x: Tensor) -> Tensor:
        dist = ops.abs(ops.sub(self._expanded(x), self.center))
        decay = ops.exp(ops.scale(ops.mul(dist, ops.softplus(self.rho)), -1.0))
        return self._reduce(ops.mul(decay, self.amplitude))


class WaveletKanLayer(_PerEdgeBasisLayer):
    """phi(x) = sum_k w_k psi((x - t_k) / s_k) with the Ricker wavelet psi(u) = (1 - u^2) exp(-u^2 / 2)."""

    kind = "wavelet"

    def __init__(self, in_dim: int, out_dim: int, config: KanConfig, rng: np.random.Generator):
        super().__init__(in_dim, out_dim, config, rng)
        self.amplitude = self._param("amplitude", self._amplitude_init)
        self.translation = self._param("translation", self._position_init)
        self.scale_raw = self._param("scale_raw", np.full((1, self.width), _SOFTPLUS_ONE))

    @property
    def scale(self) -> np.ndarray:
        return np.logaddexp(0.0, self.scale_raw.data)

    def forward(self, x: Tensor) -> Tensor:
        u = ops.div(ops.sub(self._expanded(x), self.translation), ops.softplus(self.scale_raw))
        u2 = ops.square(u)
        psi = ops.mul(ops.sub(1.0, u2), ops.exp(ops.scale(u2, -0.5)))
        return self._reduce(ops.mul(psi, self.amplitude))


LAYER_CLASSES = {
    "bspline": BsplineKanLayer,
    "fourier": FourierKanLayer,
    "laplace": LaplaceKanLayer,
    "wavelet": WaveletKanLayer,
}


def kan_init(
    config: KanConfig,
    in_dim: int,
    out_dim: int,
    seed: int | np.random.Generator = 42,
    kind: KanKind = "bspline",
) -> KanLayer:
    global _grid_eps_warned
    if kind not in LAYER_CLASSES:
        raise ValueError(f"Unknown KAN layer kind: {kind}")
    if config.grid_eps and not _grid_eps_warned:
        logger.warning("kan_grid_eps_unused grid_eps=%s grid=static", config.grid_eps)
        _grid_eps_warned = True
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return LAYER_CLASSES[kind](in_dim, out_dim, config, rng)


def kan_forward(layer: KanLayer, x: Tensor) -> Tensor:
    return layer(x)


def build_kan_layer(kind: KanKind, config: KanConfig, in_dim: int, out_dim: int, rng: np.random.Generator) -> KanLayer:
    return kan_init(config, in_dim, out_dim, rng, kind)
