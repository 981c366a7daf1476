from sgcn_module.features import init_features
from sgcn_module.model import (
    GraphAggregator,
    LinearTransform,
    ModelConfig,
    ModelState,
    embed,
    embed_tensor,
    init_model,
    layer1_forward,
    layerl_forward,
)


__all__ = [
    "GraphAggregator",
    "LinearTransform",
    "ModelConfig",
    "ModelState",
    "embed",
    "embed_tensor",
    "init_features",
    "init_model",
    "layer1_forward",
    "layerl_forward",
]
