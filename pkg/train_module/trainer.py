from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math
import time

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm

from constants_module.constants import EPOCHS, LAMB, LEARNING_RATE, SEED, WEIGHT_DECAY
from graphstore_module.graphstore import SignedGraph
from sgcn_module.model import (
    EmbeddingMatrix,
    GraphAggregator,
    ModelConfig,
    ModelState,
    embed_tensor,
    init_model,
    model_features,
    normalize_variant,
)
from tensorcore_module.optim import AdamConfig, AdamState, adam_step
from tensorcore_module.tensor import NonFiniteError, Tape, Tensor, backward
from train_module.objective import model_loss, sample_training_pairs


logger = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int, reason: str = "non-finite loss"):
        self.epoch = epoch
        super().__init__(f"Training diverged at epoch {epoch}: {reason}")


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(default=EPOCHS, ge=1)
    lamb: float = Field(default=LAMB, ge=0.0)
    learning_rate: float = Field(default=LEARNING_RATE, gt=0.0)
    weight_decay: float = Field(default=WEIGHT_DECAY, ge=0.0)
    seed: int = SEED
    # Overrides applied on top of ModelConfig; used by the layer-count sweep.
    num_layers: Optional[int] = Field(default=None, ge=1)
    variant: Optional[str] = None

    @field_validator("variant")
    @classmethod
    def _known_variant(cls, value: Optional[str]) -> Optional[str]:
        return None if value is None else normalize_variant(value)


@dataclass
class RunArtifacts:
    state: ModelState
    embeddings: EmbeddingMatrix
    loss_curve: np.ndarray
    wall_clock_seconds: float
    model_config: ModelConfig
    train_config: TrainConfig

    @property
    def initial_loss(self) -> float:
        return float(self.loss_curve[0])

    @property
    def final_loss(self) -> float:
        return float(self.loss_curve[-1])


def resolve_model_config(model_config: ModelConfig, train_config: TrainConfig) -> ModelConfig:
    updates = {}
    if train_config.variant is not None:
        updates["variant"] = train_config.variant
    if train_config.num_layers is not None:
        updates["layer_dims"] = [model_config.layer_dims[0]] * train_config.num_layers
    return model_config.model_copy(update=updates) if updates else model_config


def _warn_degenerate(g: SignedGraph, lamb: float) -> None:
    if lamb == 0:
        return
    for label, edges in (("positive", g.pos_edges), ("negative", g.neg_edges)):
        if edges.shape[0] == 0:
            logger.warning("margin_component_dropped sign=%s reason=no_%s_edges", label, label)


def train(
    g: SignedGraph,
    model_config: ModelConfig,
    train_config: TrainConfig,
    features: Optional[np.ndarray] = None,
    progress: bool = False,
) -> RunArtifacts:
    """Full-batch Adam training; features are recomputed from the graph unless given."""
    started = time.perf_counter()
    config = resolve_model_config(model_config, train_config)
    h0 = Tensor(model_features(config, g) if features is None else features)
    state = init_model(config, seed=train_config.seed)
    aggregator = GraphAggregator(g)
    _warn_degenerate(g, train_config.lamb)

    pair_seed, margin_seed = np.random.SeedSequence(train_config.seed).spawn(2)
    pair_rng, margin_rng = np.random.default_rng(pair_seed), np.random.default_rng(margin_seed)

    params = state.parameters()
    optimizer = AdamState(params, AdamConfig(learning_rate=train_config.learning_rate, weight_decay=train_config.weight_decay))
    curve = np.zeros(train_config.epochs)
    logger.info(
        "training_started variant=%s nodes=%s edges=%s epochs=%s seed=%s",
        config.variant, g.n, g.num_edges, train_config.epochs, train_config.seed,
    )

    epochs = tqdm(range(train_config.epochs), desc=config.variant, disable=not progress, leave=False)
    for epoch in epochs:
        sample = sample_training_pairs(g, pair_rng, margin_rng)
        try:
            with Tape() as tape:
                value = model_loss(state, aggregator, h0, sample, train_config.lamb)
                grads = backward(value, tape)
            adam_step(params, {name: grads[p] for name, p in params.items() if p in grads}, optimizer)
        except NonFiniteError as exc:
            raise TrainingDivergedError(epoch, f"non-finite value in {exc.op}") from exc
        curve[epoch] = value.item()
        if not math.isfinite(curve[epoch]):
            raise TrainingDivergedError(epoch)
        logger.debug("epoch=%s loss=%.6f", epoch, curve[epoch])

    embeddings = embed_tensor(state, aggregator, h0).data.copy()
    seconds = time.perf_counter() - started
    logger.info("training_finished variant=%s final_loss=%.6f seconds=%.3f", config.variant, curve[-1], seconds)
    return RunArtifacts(state, embeddings, curve, seconds, config, train_config)


def time_sweep(
    g: SignedGraph,
    variant: str,
    layer_counts: Sequence[int],
    model_config: Optional[ModelConfig] = None,
    train_config: Optional[TrainConfig] = None,
) -> List[Tuple[int, float]]:
    if not layer_counts:
        raise ValueError("time_sweep needs at least one layer count")
    model_config = model_config or ModelConfig()
    train_config = train_config or TrainConfig()
    records = []
    for layers in layer_counts:
        run = train(g, model_config, train_config.model_copy(update={"variant": variant, "num_layers": int(layers)}))
        records.append((int(layers), run.wall_clock_seconds))
        logger.info("timesweep_point variant=%s layers=%s seconds=%.3f", variant, layers, run.wall_clock_seconds)
    return records
