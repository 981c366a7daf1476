from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from constants_module.constants import (
    BASE_ACTIVATION,
    CLUSTER_KS,
    EPOCHS,
    GRID_EPS,
    GRID_RANGE,
    GRID_SIZE,
    KASGCN_BSPLINE,
    LAMB,
    LAYER_DIMS,
    LEARNING_RATE,
    NORM,
    NORM_EMBED,
    REDUCTION_DIMENSIONS,
    REDUCTION_ITERATIONS,
    REPEATS,
    SCALE_BASE,
    SCALE_NOISE,
    SCALE_SPLINE,
    SEED,
    SGCN,
    SPECTRAL_FEATURES,
    SPLINE_ORDER,
    TASKS,
    TEST_SIZE,
    TIMESWEEP_LAYERS,
    WEIGHT_DECAY,
)
from graphstore_module.synthetic import SyntheticSpec
from kan_module.layers import KanConfig
from sgcn_module.model import ModelConfig, normalize_variant
from train_module.trainer import TrainConfig

class RunConfig(BaseModel):
    """Flat run description; the manifest of a run is this model dumped as TOML."""

    model_config = ConfigDict(extra="forbid")

    # ---- dataset ----
    dataset: str
    dataset_name: Optional[str] = None
    delimiter: str = "auto"
    skip_header: bool = False

    # ---- what to run ----
    variant: str = SGCN
    task: str = "all"
    output_dir: str = "runs"
    repeats: int = Field(default=REPEATS, ge=1)
    ks: List[int] = Field(default_factory=lambda: list(CLUSTER_KS), min_length=1)
    test_size: float = Field(default=TEST_SIZE, gt=0.0, lt=1.0)
    strict: bool = False
    compare: bool = False
    compare_variant: str = KASGCN_BSPLINE
    timesweep_layers: List[int] = Field(default_factory=lambda: list(TIMESWEEP_LAYERS), min_length=1)
    jobs: int = Field(default=1, ge=1)

    # ---- model ----
    layers: List[int] = Field(default_factory=lambda: list(LAYER_DIMS), min_length=1)
    reduction_dimensions: int = Field(default=REDUCTION_DIMENSIONS, ge=1)
    reduction_iterations: int = Field(default=REDUCTION_ITERATIONS, ge=0)
    spectral_features: bool = SPECTRAL_FEATURES
    norm: bool = NORM
    norm_embed: bool = NORM_EMBED
    positive_unbalanced_first_layer: bool = False
    shared_layer_weights: bool = False

    # ---- training ----
    epochs: int = Field(default=EPOCHS, ge=1)
    lamb: float = Field(default=LAMB, ge=0.0)
    learning_rate: float = Field(default=LEARNING_RATE, gt=0.0)
    weight_decay: float = Field(default=WEIGHT_DECAY, ge=0.0)
    seed: int = SEED

    # ---- KAN ----
    grid_size: int = Field(default=GRID_SIZE, ge=1)
    spline_order: int = Field(default=SPLINE_ORDER, ge=0)
    scale_noise: float = Field(default=SCALE_NOISE, ge=0.0)
    scale_base: float = SCALE_BASE
    scale_spline: float = SCALE_SPLINE
    base_activation: Literal["silu"] = BASE_ACTIVATION
    grid_eps: float = GRID_EPS
    grid_range: Tuple[float, float] = GRID_RANGE

    @field_validator("variant", "compare_variant")
    @classmethod
    def _known_variant(cls, value: str) -> str:
        return normalize_variant(value)

    @field_validator("task")
    @classmethod
    def _known_task(cls, value: str) -> str:
        if value not in TASKS:
            raise ValueError(f"unknown task {value!r}, expected one of {TASKS}")
        return value

    @field_validator("layers", "ks", "timesweep_layers")
    @classmethod
    def _positive(cls, values: List[int]) -> List[int]:
        if any(v < 1 for v in values):
            raise ValueError(f"all entries must be >= 1, got {values}")
        return values

    @model_validator(mode="after")
    def _check_range(self) -> "RunConfig":
        if not self.grid_range[0] < self.grid_range[1]:
            raise ValueError(f"grid_range must be increasing, got {self.grid_range}")
        return self

    def kan(self) -> KanConfig:
        return KanConfig(
            grid_size=self.grid_size,
            spline_order=self.spline_order,
            scale_noise=self.scale_noise,
            scale_base=self.scale_base,
            scale_spline=self.scale_spline,
            grid_range=self.grid_range,
            grid_eps=self.grid_eps,
            base_activation=self.base_activation,
        )

    def model(self) -> ModelConfig:
        return ModelConfig(
            layer_dims=list(self.layers),
            variant=self.variant,
            norm_embed=self.norm_embed,
            feature_dim=self.reduction_dimensions,
            reduction_iterations=self.reduction_iterations,
            spectral_features=self.spectral_features,
            norm=self.norm,
            seed=self.seed,
            kan=self.kan(),
            positive_unbalanced_first_layer=self.positive_unbalanced_first_layer,
            shared_layer_weights=self.shared_layer_weights,
        )

    def training(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            lamb=self.lamb,
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            seed=self.seed,
        )


__all__ = ["RunConfig", "SyntheticSpec"]
