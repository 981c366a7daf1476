from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from constants_module.constants import (
    LAYER_DIMS,
    NORM,
    NORM_EMBED,
    REDUCTION_DIMENSIONS,
    REDUCTION_ITERATIONS,
    SEED,
    SGCN,
    SPECTRAL_FEATURES,
    VARIANT_ALIASES,
    VARIANT_TO_KAN_KIND,
    VARIANTS,
)
from graphstore_module.graphstore import SignedGraph
from kan_module.checkpoint import load_into, save_named_tensors
from kan_module.layers import KanConfig, KanLayer, kan_init, xavier_uniform
from sgcn_module.features import init_features
from tensorcore_module import ops
from tensorcore_module.ops import RowMeanIndex
from tensorcore_module.tensor import ShapeError, Tensor


logger = logging.getLogger(__name__)

EmbeddingMatrix = np.ndarray


def normalize_variant(value: str) -> str:
    key = (value or "").strip().lower()
    variant = VARIANT_ALIASES.get(key, key)
    if variant not in VARIANTS:
        raise ValueError(f"Unknown variant {value!r}; expected one of {VARIANTS}")
    return variant


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layer_dims: List[int] = Field(default_factory=lambda: list(LAYER_DIMS), min_length=1)
    variant: str = SGCN
    activation: Literal["tanh"] = "tanh"
    norm_embed: bool = NORM_EMBED
    feature_dim: int = Field(default=REDUCTION_DIMENSIONS, ge=1)
    reduction_iterations: int = Field(default=REDUCTION_ITERATIONS, ge=0)
    spectral_features: bool = SPECTRAL_FEATURES
    norm: bool = NORM
    seed: int = SEED
    kan: KanConfig = Field(default_factory=KanConfig)
    # Literal readings of the published layer equations; off means the standard SGCN reading.
    positive_unbalanced_first_layer: bool = False
    shared_layer_weights: bool = False

    @field_validator("layer_dims")
    @classmethod
    def _positive_dims(cls, dims: List[int]) -> List[int]:
        if any(d < 1 for d in dims):
            raise ValueError(f"layer_dims must all be >= 1, got {dims}")
        return dims

    @field_validator("variant")
    @classmethod
    def _known_variant(cls, value: str) -> str:
        return normalize_variant(value)

    @property
    def embedding_dim(self) -> int:
        return 2 * self.layer_dims[-1]


class LinearTransform:
    """Bias-free weight matrix, optionally preceded by SiLU."""

    kind = "linear"

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, pre_activation: Optional[str] = None):
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.pre_activation = pre_activation
        self.weight = Tensor(xavier_uniform(rng, out_dim, in_dim), requires_grad=True, name="weight")

    def parameters(self) -> Dict[str, Tensor]:
        return {"weight": self.weight}

    @property
    def num_parameters(self) -> int:
        return int(self.weight.data.size)

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[1] != self.in_dim:
            raise ShapeError(f"linear transform expects {self.in_dim} columns, got {x.shape[1]}")
        h = ops.silu(x) if self.pre_activation == "silu" else x
        return ops.matmul(h, ops.transpose(self.weight))


Transform = Union[LinearTransform, KanLayer]


class GraphAggregator:
    """Mean-over-neighbors indices for N_i^+ and N_i^-, built once per graph."""

    def __init__(self, g: SignedGraph):
        self.n = g.n
        self.pos = RowMeanIndex(g.pos_adj)
        self.neg = RowMeanIndex(g.neg_adj)

    @classmethod
    def of(cls, g: Union[SignedGraph, "GraphAggregator"]) -> "GraphAggregator":
        return g if isinstance(g, GraphAggregator) else cls(g)


class ModelState:
    """Per-layer balanced/unbalanced transforms plus the 3-class pair classifier."""

    def __init__(
        self,
        config: ModelConfig,
        balanced: List[Transform],
        unbalanced: List[Transform],
        classifier_weight: Tensor,
        classifier_bias: Tensor,
    ):
        if len(balanced) != len(config.layer_dims) or len(unbalanced) != len(config.layer_dims):
            raise ValueError("one balanced and one unbalanced transform per layer is required")
        self.config = config
        self.balanced = balanced
        self.unbalanced = unbalanced
        self.classifier_weight = classifier_weight
        self.classifier_bias = classifier_bias

    def parameters(self) -> Dict[str, Tensor]:
        params: Dict[str, Tensor] = {}
        seen = set()
        for l, (tb, tu) in enumerate(zip(self.balanced, self.unbalanced), start=1):
            for stream, transform in (("balanced", tb), ("unbalanced", tu)):
                if id(transform) in seen:
                    continue
                seen.add(id(transform))
                for name, tensor in transform.parameters().items():
                    params[f"layer{l}.{stream}.{name}"] = tensor
        params["classifier.weight"] = self.classifier_weight
        params["classifier.bias"] = self.classifier_bias
        return params

    @property
    def num_parameters(self) -> int:
        return int(sum(p.data.size for p in self.parameters().values()))

    def save(self, path: str | Path) -> Path:
        return save_named_tensors(path, self.parameters())

    def load(self, path: str | Path) -> None:
        load_into(self.parameters(), path)


def _build_transform(config: ModelConfig, in_dim: int, out_dim: int, rng: np.random.Generator) -> Transform:
    if config.variant == SGCN:
        return LinearTransform(in_dim, out_dim, rng)
    return kan_init(config.kan, in_dim, out_dim, rng, VARIANT_TO_KAN_KIND[config.variant])


def layer_input_dims(config: ModelConfig) -> List[Tuple[int, int]]:
    dims = []
    previous = config.feature_dim
    for l, out_dim in enumerate(config.layer_dims, start=1):
        dims.append(((2 if l == 1 else 3) * previous, out_dim))
        previous = out_dim
    return dims


def init_model(config: ModelConfig, seed: Optional[int] = None) -> ModelState:
    rng = np.random.default_rng(config.seed if seed is None else seed)
    balanced: List[Transform] = []
    unbalanced: List[Transform] = []
    for l, (in_dim, out_dim) in enumerate(layer_input_dims(config), start=1):
        tb = _build_transform(config, in_dim, out_dim, rng)
        shared = config.shared_layer_weights and l > 1
        tu = tb if shared else _build_transform(config, in_dim, out_dim, rng)
        balanced.append(tb)
        unbalanced.append(tu)
    width = 2 * config.embedding_dim
    classifier_weight = Tensor(xavier_uniform(rng, 3, width).T, requires_grad=True, name="classifier.weight")
    classifier_bias = Tensor(np.zeros((1, 3)), requires_grad=True, name="classifier.bias")
    state = ModelState(config, balanced, unbalanced, classifier_weight, classifier_bias)
    logger.debug("model_initialized variant=%s layers=%s parameters=%s", config.variant, config.layer_dims, state.num_parameters)
    return state


def _sigma(x: Tensor) -> Tensor:
    return ops.tanh(x)


def layer1_forward(state: ModelState, g: Union[SignedGraph, GraphAggregator], h0: Tensor) -> Tuple[Tensor, Tensor]:
    if h0.shape[1] != state.config.feature_dim:
        raise ShapeError(f"h0 has {h0.shape[1]} columns, feature_dim is {state.config.feature_dim}")
    agg = GraphAggregator.of(g)
    unbalanced_index = agg.pos if state.config.positive_unbalanced_first_layer else agg.neg
    hb = _sigma(state.balanced[0](ops.concat_cols(ops.row_mean_subset(h0, agg.pos), h0)))
    hu = _sigma(state.unbalanced[0](ops.concat_cols(ops.row_mean_subset(h0, unbalanced_index), h0)))
    return hb, hu


def layerl_forward(
    state: ModelState,
    g: Union[SignedGraph, GraphAggregator],
    hb: Tensor,
    hu: Tensor,
    l: int,
) -> Tuple[Tensor, Tensor]:
    if l < 2 or l > len(state.balanced):
        raise ValueError(f"layerl_forward needs 2 <= l <= {len(state.balanced)}, got {l}")
    agg = GraphAggregator.of(g)
    new_b = state.balanced[l - 1](ops.concat_cols(ops.row_mean_subset(hb, agg.pos), ops.row_mean_subset(hu, agg.neg), hb))
    new_u = state.unbalanced[l - 1](ops.concat_cols(ops.row_mean_subset(hu, agg.pos), ops.row_mean_subset(hb, agg.neg), hu))
    return _sigma(new_b), _sigma(new_u)


def embed_tensor(state: ModelState, g: Union[SignedGraph, GraphAggregator], h0: Tensor) -> Tensor:
    """Differentiable forward pass: z_i = [h_i^B(L), h_i^U(L)], row-normalized when norm_embed is on."""
    agg = GraphAggregator.of(g)
    hb, hu = layer1_forward(state, agg, h0)
    for l in range(2, len(state.balanced) + 1):
        hb, hu = layerl_forward(state, agg, hb, hu, l)
    z = ops.concat_cols(hb, hu)
    return ops.normalize_rows(z) if state.config.norm_embed else z


def model_features(config: ModelConfig, g: SignedGraph) -> np.ndarray:
    return init_features(
        g,
        dims=config.feature_dim,
        iters=config.reduction_iterations,
        seed=config.seed,
        norm=config.norm,
        spectral=config.spectral_features,
    )


def embed(state: ModelState, g: SignedGraph, features: Optional[np.ndarray] = None) -> EmbeddingMatrix:
    h0 = model_features(state.config, g) if features is None else features
    return embed_tensor(state, g, Tensor(h0)).data.copy()
