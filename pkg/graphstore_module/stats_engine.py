from __future__ import annotations

from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from constants_module.constants import GRAPH_STATS_REFERENCE
from graphstore_module.graphstore import SignedGraph


TABLE_COLUMNS = [
    ("vertices", "Vertices"),
    ("edges", "Edges"),
    ("cycles", "Cycles"),
    ("density", "Density"),
    ("triads", "Triads"),
    ("avg_degree", "Avg Deg"),
    ("median_degree", "Median Deg"),
    ("max_degree", "Max Deg"),
    ("pct_negative", "% Neg"),
]


class GraphStats(BaseModel):
    # whole graph
    vertices: int
    edges: int
    cycles: int
    components: int
    # largest connected component
    lcc_vertices: int
    lcc_edges: int
    density: float
    triads: int
    avg_degree: float
    median_degree: int
    max_degree: int
    pct_negative: float = Field(ge=0.0, le=100.0)
    lcc_fields: List[str] = ["density", "triads", "avg_degree", "median_degree", "max_degree", "pct_negative"]


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def component_labels(g: SignedGraph) -> np.ndarray:
    uf = UnionFind(g.n)
    for u, v, _ in g.edges:
        uf.union(int(u), int(v))
    return np.array([uf.find(i) for i in range(g.n)], dtype=np.int64)


def count_triangles(g: SignedGraph, nodes: Optional[np.ndarray] = None) -> int:
    keep = set(range(g.n)) if nodes is None else {int(x) for x in nodes}
    nbrs = [g.neighbor_sets[i] & keep if i in keep else frozenset() for i in range(g.n)]
    total = 0
    for u in keep:
        higher = {v for v in nbrs[u] if v > u}
        for v in higher:
            total += sum(1 for w in nbrs[v] if w > v and w in higher)
    return total


def lower_median(values: np.ndarray) -> int:
    if values.size == 0:
        return 0
    ordered = np.sort(values)
    return int(ordered[(ordered.size - 1) // 2])


def graph_stats(g: SignedGraph) -> GraphStats:
    if g.n == 0:
        raise ValueError("graph_stats needs a nonempty graph")

    labels = component_labels(g)
    roots, counts = np.unique(labels, return_counts=True)
    components = int(roots.size)
    # ties go to the component holding the smallest node id
    best = max(range(components), key=lambda i: (counts[i], -int(np.flatnonzero(labels == roots[i])[0])))
    lcc_nodes = np.flatnonzero(labels == roots[best])

    in_lcc = np.zeros(g.n, dtype=bool)
    in_lcc[lcc_nodes] = True
    lcc_edges = g.edges[in_lcc[g.edges[:, 0]]] if g.num_edges else g.edges
    v_lcc = int(lcc_nodes.size)
    e_lcc = int(lcc_edges.shape[0])
    degrees = g.degrees[lcc_nodes]

    def ratio(numerator: float, denominator: float) -> float:
        return float(numerator / denominator) if denominator > 0 else 0.0

    return GraphStats(
        vertices=g.n,
        edges=g.num_edges,
        cycles=g.num_edges - g.n + components,
        components=components,
        lcc_vertices=v_lcc,
        lcc_edges=e_lcc,
        density=ratio(2.0 * e_lcc, v_lcc * (v_lcc - 1)),
        triads=count_triangles(g, lcc_nodes),
        avg_degree=ratio(2.0 * e_lcc, v_lcc),
        median_degree=lower_median(degrees),
        max_degree=int(degrees.max()) if degrees.size else 0,
        pct_negative=100.0 * ratio(int(np.sum(lcc_edges[:, 2] < 0)), e_lcc),
    )


def stats_frame(rows: Dict[str, GraphStats], compare_published: bool = False) -> pd.DataFrame:
    records = []
    for name, stats in rows.items():
        dumped = stats.model_dump()
        record = {"Dataset": name}
        for key, label in TABLE_COLUMNS:
            value = dumped[key]
            record[label] = round(value, 3) if key == "density" else round(value, 2) if isinstance(value, float) else value
        records.append(record)
        reference = GRAPH_STATS_REFERENCE.get(name)
        if compare_published and reference:
            records.append({"Dataset": f"{name} (published)", **{label: reference[key] for key, label in TABLE_COLUMNS}})
    return pd.DataFrame.from_records(records, columns=["Dataset"] + [label for _, label in TABLE_COLUMNS])


def stats_table(rows: Dict[str, GraphStats], compare_published: bool = False) -> str:
    return stats_frame(rows, compare_published).to_string(index=False)
