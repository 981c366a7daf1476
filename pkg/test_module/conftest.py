import numpy as np
import pytest

from graphstore_module.graphstore import SignedGraph, preprocess
from graphstore_module.synthetic import SyntheticSpec, fixture_graph, planted_partition
from kan_module.layers import KanConfig
from sgcn_module.model import ModelConfig


@pytest.fixture
def small_graph() -> SignedGraph:
    return fixture_graph()


@pytest.fixture
def triangle() -> SignedGraph:
    return SignedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, -1)])


@pytest.fixture
def planted():
    records, labels = planted_partition(SyntheticSpec(blocks=2, nodes_per_block=10, seed=7))
    return preprocess(records), labels


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


def tiny_model_config(variant: str = "sgcn", **updates) -> ModelConfig:
    base = dict(
        layer_dims=[3, 2],
        variant=variant,
        feature_dim=3,
        kan=KanConfig(grid_size=3, spline_order=2),
    )
    base.update(updates)
    return ModelConfig(**base)
