import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphstore_module.graphstore import (
    EdgeListFormatError,
    SignedGraph,
    encode,
    load_edge_list,
    preprocess,
    split_edges,
    subgraph,
    write_edge_list,
)
from graphstore_module.stats_engine import count_triangles, graph_stats, stats_table
from graphstore_module.synthetic import SyntheticSpec, expected_pct_negative, planted_partition, write_synthetic


raw_records = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12), st.sampled_from([-2.0, -1.0, 0.0, 1.0, 3.0])),
    max_size=40,
)


def test_load_edge_list_skips_comments_and_extra_columns(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("% konect header\n# another\n1\t2\t1\t123456\n2\t3\t-1\t99\n\n")
    assert load_edge_list(path) == [(1, 2, 1.0), (2, 3, -1.0)]


def test_load_edge_list_header_and_whitespace(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("src dst w\n5 7 -3\n7 9 2\n")
    assert load_edge_list(path, skip_header=True) == [(5, 7, -3.0), (7, 9, 2.0)]


def test_load_edge_list_reports_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,1\n3,x,1\n")
    with pytest.raises(EdgeListFormatError) as info:
        load_edge_list(path)
    assert info.value.line_number == 2


def test_preprocess_drops_loops_keeps_first_duplicate_and_reindexes():
    g = preprocess([(10, 20, 1.0), (20, 10, -1.0), (30, 30, 1.0), (20, 40, -0.5), (10, 40, 0.0)])
    assert g.n == 3
    assert g.edges.tolist() == [[0, 1, 1], [0, 2, 1], [1, 2, -1]]


def test_preprocess_empty_input():
    g = preprocess([])
    assert g.n == 0 and g.num_edges == 0


@settings(max_examples=50, deadline=None)
@given(raw_records)
def test_preprocess_is_idempotent(records):
    g = preprocess(records)
    assert preprocess(encode(g)).same_as(g)


@settings(max_examples=50, deadline=None)
@given(raw_records)
def test_adjacency_is_symmetric_and_sign_disjoint(records):
    g = preprocess(records)
    for i in range(g.n):
        for j in g.pos_adj[i]:
            assert i in g.pos_adj[j]
        for j in g.neg_adj[i]:
            assert i in g.neg_adj[j]
        assert not set(g.pos_adj[i]) & set(g.neg_adj[i])
    assert sum(len(p) + len(q) for p, q in zip(g.pos_adj, g.neg_adj)) == 2 * g.num_edges


def test_write_then_load_round_trip(tmp_path, small_graph):
    path = write_edge_list(encode(small_graph), tmp_path / "out.csv")
    assert preprocess(load_edge_list(path)).same_as(small_graph)


def test_split_edges_is_stratified_and_deterministic():
    edges = [(i, i + 1, 1) for i in range(10)] + [(i, i + 2, -1) for i in range(5)]
    g = SignedGraph.from_edges(12, edges)
    split = split_edges(g, 0.2, seed=3)
    test = split.test_edges
    assert int((test[:, 2] > 0).sum()) == 2
    assert int((test[:, 2] < 0).sum()) == 1
    assert split.train_edges.shape[0] + test.shape[0] == g.num_edges
    again = split_edges(g, 0.2, seed=3)
    assert np.array_equal(again.test_edges, test)


def test_split_edges_rejects_missing_class():
    g = SignedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(ValueError, match="negative"):
        split_edges(g)


def test_subgraph_keeps_node_set(small_graph):
    sub = subgraph(small_graph, small_graph.edges[:3])
    assert sub.n == small_graph.n
    assert sub.num_edges == 3


def test_triangle_stats(triangle):
    stats = graph_stats(triangle)
    assert stats.vertices == 3
    assert stats.edges == 3
    assert stats.cycles == 1
    assert stats.triads == 1
    assert stats.density == pytest.approx(1.0)
    assert stats.avg_degree == pytest.approx(2.0)
    assert stats.median_degree == 2
    assert stats.pct_negative == pytest.approx(100.0 / 3.0)


def test_stats_restrict_degree_fields_to_lcc():
    g = SignedGraph.from_edges(6, [(0, 1, 1), (1, 2, -1), (0, 2, 1), (3, 4, 1)])
    stats = graph_stats(g)
    assert stats.components == 3
    assert stats.cycles == 4 - 6 + 3
    assert stats.lcc_vertices == 3
    assert stats.lcc_edges == 3
    assert stats.max_degree == 2


def test_count_triangles_matches_brute_force(planted):
    g, _ = planted
    brute = sum(
        1
        for a in range(g.n)
        for b in range(a + 1, g.n)
        for c in range(b + 1, g.n)
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c)
    )
    assert count_triangles(g) == brute


def test_stats_table_compare_published_row(triangle):
    table = stats_table({"Congress": graph_stats(triangle)}, compare_published=True)
    assert "Congress (published)" in table
    assert "219" in table


def test_planted_partition_counts_are_exact_without_noise():
    spec = SyntheticSpec(blocks=2, nodes_per_block=5, noise=0.0)
    records, labels = planted_partition(spec)
    g = preprocess(records)
    stats = graph_stats(g)
    assert stats.edges == 45
    assert int((g.edges[:, 2] < 0).sum()) == 25
    assert stats.pct_negative == pytest.approx(expected_pct_negative(spec))
    assert labels.tolist() == [0] * 5 + [1] * 5


def test_planted_pct_negative_within_binomial_band():
    spec = SyntheticSpec(blocks=3, nodes_per_block=15, p_within_positive=0.6, p_between_negative=0.3, noise=0.1, seed=5)
    g = preprocess(planted_partition(spec)[0])
    p = expected_pct_negative(spec) / 100.0
    observed = float((g.edges[:, 2] < 0).mean())
    sigma = np.sqrt(p * (1 - p) / g.num_edges)
    assert abs(observed - p) < 3 * sigma + 0.02


def test_write_synthetic_is_reproducible(tmp_path):
    spec = SyntheticSpec(seed=11)
    first, labels_path = write_synthetic(spec, tmp_path / "a.csv")
    second, _ = write_synthetic(spec, tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()
    assert labels_path.name == "a_labels.csv"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_split_edges_partitions_random_graph(seed):
    rng = np.random.default_rng(seed)
    pairs = np.array([(u, v) for u in range(20) for v in range(u + 1, 20)])
    picked = pairs[rng.choice(len(pairs), size=50, replace=False)]
    signs = np.where(np.arange(50) < 35, 1, -1)
    g = SignedGraph.from_edges(20, [(int(u), int(v), int(s)) for (u, v), s in zip(picked, signs)])
    split = split_edges(g, 0.2, seed=seed)
    train = {tuple(e) for e in split.train_edges.tolist()}
    test = {tuple(e) for e in split.test_edges.tolist()}
    assert train | test == {tuple(e) for e in g.edges.tolist()}
    assert not train & test
    assert len(train) + len(test) == 50
    assert sum(s > 0 for _, _, s in test) == 7
    assert sum(s < 0 for _, _, s in test) == 3
