from graphstore_module.graphstore import (
    EdgeListFormatError,
    EdgeSplit,
    SignedGraph,
    encode,
    load_edge_list,
    preprocess,
    split_edges,
    subgraph,
    write_edge_list,
)
from graphstore_module.stats_engine import GraphStats, graph_stats, stats_table
from graphstore_module.synthetic import SyntheticSpec, expected_pct_negative, fixture_graph, planted_partition, write_synthetic


__all__ = [
    "EdgeListFormatError",
    "EdgeSplit",
    "GraphStats",
    "SignedGraph",
    "SyntheticSpec",
    "encode",
    "expected_pct_negative",
    "fixture_graph",
    "graph_stats",
    "load_edge_list",
    "planted_partition",
    "preprocess",
    "split_edges",
    "stats_table",
    "subgraph",
    "write_edge_list",
    "write_synthetic",
]
