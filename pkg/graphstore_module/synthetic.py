from __future__ import annotations

from pathlib import Path
from typing import Tuple
import logging

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from graphstore_module.graphstore import RawEdgeList, SignedGraph, write_edge_list


logger = logging.getLogger(__name__)


class SyntheticSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    blocks: int = Field(default=2, ge=1)
    nodes_per_block: int = Field(default=20, ge=1)
    p_within_positive: float = Field(default=1.0, ge=0.0, le=1.0)
    p_between_negative: float = Field(default=1.0, ge=0.0, le=1.0)
    noise: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = 42


def _pair_counts(spec: SyntheticSpec) -> Tuple[int, int]:
    n = spec.blocks * spec.nodes_per_block
    within = spec.blocks * spec.nodes_per_block * (spec.nodes_per_block - 1) // 2
    return within, n * (n - 1) // 2 - within


def planted_partition(spec: SyntheticSpec) -> Tuple[RawEdgeList, np.ndarray]:
    """Positive edges inside blocks, negative edges across blocks, signs flipped with prob `noise`."""
    n = spec.blocks * spec.nodes_per_block
    labels = np.repeat(np.arange(spec.blocks), spec.nodes_per_block)
    rng = np.random.default_rng(spec.seed)

    u, v = np.triu_indices(n, k=1)
    same = labels[u] == labels[v]
    keep = rng.random(u.size) < np.where(same, spec.p_within_positive, spec.p_between_negative)
    flip = rng.random(u.size) < spec.noise
    sign = np.where(same, 1, -1) * np.where(flip, -1, 1)

    records: RawEdgeList = [(int(a), int(b), float(s)) for a, b, s in zip(u[keep], v[keep], sign[keep])]
    logger.info("synthetic_graph_generated nodes=%s edges=%s seed=%s", n, len(records), spec.seed)
    return records, labels


def expected_pct_negative(spec: SyntheticSpec) -> float:
    within, between = _pair_counts(spec)
    edges = within * spec.p_within_positive + between * spec.p_between_negative
    if edges == 0:
        return 0.0
    negatives = between * spec.p_between_negative * (1.0 - spec.noise) + within * spec.p_within_positive * spec.noise
    return 100.0 * negatives / edges


def write_synthetic(spec: SyntheticSpec, path: str | Path, delimiter: str = ",") -> Tuple[Path, Path]:
    records, labels = planted_partition(spec)
    edge_path = write_edge_list(records, path, delimiter)
    labels_path = edge_path.with_name(edge_path.stem + "_labels.csv")
    pd.DataFrame({"node": np.arange(labels.size), "block": labels}).to_csv(labels_path, index=False)
    return edge_path, labels_path


FIXTURE_EDGES: RawEdgeList = [
    (0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (3, 4, 1.0),
    (4, 5, 1.0), (2, 3, -1.0), (0, 5, -1.0), (1, 4, -1.0),
]


def fixture_graph() -> SignedGraph:
    """Six nodes, eight edges: positive groups {0, 1, 2} and {3, 4, 5} joined by negative edges."""
    return SignedGraph.from_edges(6, FIXTURE_EDGES)
