import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from constants_module.constants import LOGREG_L2
from graphstore_module.graphstore import EdgeSplit, SignedGraph
from eval_module.clustering import cluster_quality, kmeanspp
from eval_module.experiment import (
    ExperimentReport,
    MetricSummary,
    apply_gains,
    compare_variants,
    gain,
    metric_key,
    run_experiment,
    summarize,
)
from eval_module.linksign import (
    auc,
    edge_features,
    evaluate_link_sign,
    f1,
    logreg_fit,
    logreg_objective,
    precision_recall_f1,
    predict,
    predict_proba,
)
from eval_module.similarity import avg_cosine_similarity
from eval_module.tables import clustering_frame, linksign_frame, render, similarity_frame, timings_frame
from tensorcore_module.tensor import ShapeError
from train_module.trainer import TrainConfig
from test_module.conftest import tiny_model_config


def blobs(seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    return np.concatenate([c + rng.normal(scale=0.3, size=(20, 2)) for c in centers])


# ---------- clustering ----------

def test_kmeans_with_k_equal_n_has_zero_inertia(rng):
    points = rng.normal(size=(7, 3))
    result = kmeanspp(points, 7, seed=1)
    assert result.inertia == pytest.approx(0.0, abs=1e-12)
    assert sorted(result.labels.tolist()) == list(range(7))


def test_kmeans_recovers_blobs():
    result = kmeanspp(blobs(), 3, seed=0)
    for block in range(3):
        assert len(set(result.labels[block * 20:(block + 1) * 20].tolist())) == 1
    assert len(set(result.labels.tolist())) == 3


def test_kmeans_inertia_never_increases(rng):
    result = kmeanspp(rng.normal(size=(60, 4)), 5, seed=2)
    history = np.array(result.inertia_history)
    assert np.all(np.diff(history) <= 1e-9)
    assert result.inertia == pytest.approx(history[-1])


def test_kmeans_is_scale_invariant():
    points = blobs(1)
    a = kmeanspp(points, 3, seed=4)
    b = kmeanspp(points * 4.0, 3, seed=4)
    assert np.array_equal(a.labels, b.labels)
    assert b.inertia == pytest.approx(16.0 * a.inertia)


def test_kmeans_duplicate_points():
    points = np.zeros((5, 2))
    result = kmeanspp(points, 3, seed=0)
    assert result.inertia == 0.0


def test_kmeans_rejects_bad_k(rng):
    with pytest.raises(ValueError):
        kmeanspp(rng.normal(size=(3, 2)), 4)
    with pytest.raises(ValueError):
        kmeanspp(rng.normal(size=(3, 2)), 0)


def test_cluster_quality_perfect_split():
    g = SignedGraph.from_edges(4, [(0, 1, 1), (2, 3, 1), (0, 2, -1), (1, 3, -1)])
    quality = cluster_quality(g, [0, 0, 1, 1])
    assert quality.pos_in == 1.0 and quality.neg_out == 1.0 and quality.q == 2.0


def test_cluster_quality_single_cluster(triangle):
    quality = cluster_quality(triangle, [0, 0, 0])
    assert quality.pos_in == 1.0
    assert quality.neg_out == 0.0


def test_cluster_quality_vacuous_negative():
    g = SignedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    quality = cluster_quality(g, [0, 1, 1])
    assert quality.pos_in == pytest.approx(0.5)
    assert quality.neg_out == 1.0 and quality.neg_out_vacuous


def test_cluster_quality_label_length(triangle):
    with pytest.raises(ShapeError):
        cluster_quality(triangle, [0, 1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=20, max_size=20), st.permutations([0, 1, 2, 3]))
def test_cluster_quality_brute_force_and_relabel(labels, relabel):
    from graphstore_module.graphstore import preprocess
    from graphstore_module.synthetic import SyntheticSpec, planted_partition

    g = preprocess(planted_partition(SyntheticSpec(blocks=2, nodes_per_block=10, seed=7))[0])
    labels = np.resize(np.array(labels), g.n)
    quality = cluster_quality(g, labels)
    same = [labels[u] == labels[v] for u, v, _ in g.edges]
    signs = g.edges[:, 2]
    pos_total = int((signs > 0).sum())
    neg_total = int((signs < 0).sum())
    pos_in = sum(s and w > 0 for s, w in zip(same, signs)) / pos_total
    neg_out = sum((not s) and w < 0 for s, w in zip(same, signs)) / neg_total
    assert quality.pos_in == pytest.approx(pos_in)
    assert quality.neg_out == pytest.approx(neg_out)
    renamed = cluster_quality(g, np.array(relabel)[labels])
    assert renamed.q == pytest.approx(quality.q)


@st.composite
def signed_graphs(draw, max_nodes: int = 30, max_edges: int = 100):
    n = draw(st.integers(2, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=min(max_edges, len(pairs)), unique=True))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=len(chosen), max_size=len(chosen)))
    return SignedGraph.from_edges(n, [(u, v, s) for (u, v), s in zip(chosen, signs)])


@settings(max_examples=100, deadline=None)
@given(signed_graphs(), st.data())
def test_cluster_quality_matches_edge_loop(g, data):
    labels = np.array(data.draw(st.lists(st.integers(0, 4), min_size=g.n, max_size=g.n)))
    pos_same, pos_total, neg_cross, neg_total = 0, 0, 0, 0
    for u, v, s in g.edges.tolist():
        if s > 0:
            pos_total += 1
            pos_same += labels[u] == labels[v]
        else:
            neg_total += 1
            neg_cross += labels[u] != labels[v]
    pos_in = pos_same / pos_total if pos_total else 1.0
    neg_out = neg_cross / neg_total if neg_total else 1.0
    quality = cluster_quality(g, labels)
    assert quality.pos_in == pytest.approx(pos_in, abs=1e-12)
    assert quality.neg_out == pytest.approx(neg_out, abs=1e-12)
    assert quality.q == pytest.approx(pos_in + neg_out, abs=1e-12)


def test_kmeans_recovers_blobs_across_seeds():
    recovered = 0
    for seed in range(100):
        labels = kmeanspp(blobs(seed), 3, seed=seed).labels
        blocks = [set(labels[b * 20:(b + 1) * 20].tolist()) for b in range(3)]
        recovered += all(len(block) == 1 for block in blocks) and len(set.union(*blocks)) == 3
    assert recovered >= 99


def test_kmeans_is_translation_invariant():
    points = blobs(2)
    a = kmeanspp(points, 3, seed=6)
    b = kmeanspp(points + np.array([25.0, -40.0]), 3, seed=6)
    assert np.array_equal(a.labels, b.labels)
    assert b.inertia == pytest.approx(a.inertia, rel=1e-9)


# ---------- link sign ----------

def test_edge_features_layout():
    emb = np.arange(6.0).reshape(3, 2)
    assert edge_features(emb, [[0, 2, 1]]).tolist() == [[0.0, 1.0, 4.0, 5.0]]
    with pytest.raises(IndexError):
        edge_features(emb, [[0, 3, 1]])


def test_logreg_separable_data():
    x = np.array([[-2.0], [-1.5], [-1.0], [1.0], [1.5], [2.0]])
    y = np.array([-1, -1, -1, 1, 1, 1])
    model = logreg_fit(x, y)
    assert predict(model, x).tolist() == y.tolist()
    assert model.classes.tolist() == [-1, 1]
    probs = predict_proba(model, x)
    assert np.allclose(probs.sum(axis=1), 1.0)


def test_logreg_zero_features_learn_class_priors():
    y = np.array([1, 1, 1, -1])
    model = logreg_fit(np.zeros((4, 2)), y, max_iter=5000, tol=1e-10)
    assert predict_proba(model, np.zeros((1, 2)))[0, model.positive_column] == pytest.approx(0.75, abs=1e-4)


def test_logreg_objective_decreases_from_zero():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(30, 3))
    y = np.where(x[:, 0] + 0.3 * rng.normal(size=30) > 0, 1, -1)
    short = logreg_fit(x, y, max_iter=1)
    longer = logreg_fit(x, y, max_iter=200)
    assert logreg_objective(longer, x, y) < logreg_objective(short, x, y)


def test_logreg_needs_two_classes():
    with pytest.raises(ValueError):
        logreg_fit(np.zeros((3, 1)), np.array([1, 1, 1]))


def test_auc_ordered_and_reversed():
    labels = np.array([-1, -1, 1, 1])
    assert auc([0.1, 0.2, 0.8, 0.9], labels) == 1.0
    assert auc([0.9, 0.8, 0.2, 0.1], labels) == 0.0


def test_auc_ties_count_half():
    scores = np.array([0.5, 0.5, 0.7, 0.2])
    labels = np.array([1, -1, 1, -1])
    # pairs (pos, neg): (0.5,0.5)=.5 (0.5,0.2)=1 (0.7,0.5)=1 (0.7,0.2)=1
    assert auc(scores, labels) == pytest.approx(3.5 / 4)


def test_auc_invariant_under_monotone_transform(rng):
    scores = rng.uniform(size=40)
    labels = np.where(rng.uniform(size=40) > 0.5, 1, -1)
    assert auc(np.exp(3 * scores), labels) == pytest.approx(auc(scores, labels))


def test_auc_single_class():
    with pytest.raises(ValueError):
        auc([0.1, 0.2], [1, 1])


def test_f1_worked_example():
    predictions = [1, 1, 1, 1, -1, -1, -1]
    labels = [1, 1, 1, -1, 1, 1, -1]
    precision, recall, value = precision_recall_f1(predictions, labels)
    assert precision == pytest.approx(0.75)
    assert recall == pytest.approx(0.6)
    assert value == pytest.approx(2 / 3)
    assert f1([-1, -1], [1, -1]) == 0.0


def test_evaluate_link_sign_on_separable_embeddings():
    emb = np.array([[1.0, 0.0]] * 5 + [[-1.0, 0.0]] * 5)
    train = np.array([[0, 1, 1], [2, 3, 1], [5, 6, 1], [0, 6, -1], [1, 7, -1], [3, 8, -1]])
    test = np.array([[1, 4, 1], [7, 9, 1], [2, 9, -1], [4, 5, -1]])
    report = evaluate_link_sign(emb, EdgeSplit(train, test, 0))
    assert report.test_edges == 4
    assert 0.0 <= report.auc <= 1.0
    assert report.f1_consistent()


def test_evaluate_link_sign_names_missing_test_class():
    emb = np.array([[1.0, 0.0]] * 5 + [[-1.0, 0.0]] * 5)
    train = np.array([[0, 1, 1], [2, 3, 1], [0, 6, -1], [1, 7, -1]])
    test = np.array([[1, 4, 1], [7, 9, 1]])
    with pytest.raises(ValueError, match="no negative edges"):
        evaluate_link_sign(emb, EdgeSplit(train, test, 0))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.sampled_from([1, -1])), min_size=2, max_size=100))
def test_auc_matches_pair_counting(rows):
    scores = np.array([s for s, _ in rows], dtype=np.float64) / 6.0
    labels = np.array([y for _, y in rows])
    assume((labels == 1).any() and (labels == -1).any())
    wins = 0.0
    for sp in scores[labels == 1]:
        for sn in scores[labels == -1]:
            wins += 1.0 if sp > sn else 0.5 if sp == sn else 0.0
    expected = wins / ((labels == 1).sum() * (labels == -1).sum())
    assert auc(scores, labels) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([1, -1]), st.sampled_from([1, -1])), min_size=1, max_size=100))
def test_precision_recall_f1_match_counting(rows):
    tp = sum(p == 1 and y == 1 for p, y in rows)
    fp = sum(p == 1 and y == -1 for p, y in rows)
    fn = sum(p == -1 and y == 1 for p, y in rows)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    expected_f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    predictions, labels = zip(*rows)
    assert precision_recall_f1(predictions, labels) == pytest.approx((precision, recall, expected_f1), abs=1e-12)
    assert f1(predictions, labels) == pytest.approx(expected_f1, abs=1e-12)


def test_logreg_matches_reference_descent():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(100, 3))
    y = np.where(x @ np.array([1.0, -0.5, 0.2]) + 0.5 * rng.normal(size=100) > 0, 1, -1)
    model = logreg_fit(x, y, max_iter=300, tol=0.0)

    onehot = np.stack([y == -1, y == 1], axis=1).astype(np.float64)
    step = 1.0 / (0.5 * np.linalg.norm(np.hstack([x, np.ones((100, 1))]), ord=2) ** 2 / 100 + LOGREG_L2)
    weights, bias = np.zeros((3, 2)), np.zeros(2)
    for _ in range(300):
        logits = x @ weights + bias
        probs = np.exp(logits - logits.max(axis=1, keepdims=True))
        probs /= probs.sum(axis=1, keepdims=True)
        residual = (probs - onehot) / 100
        grad_w, grad_b = x.T @ residual + LOGREG_L2 * weights, residual.sum(axis=0)
        weights, bias = weights - step * grad_w, bias - step * grad_b

    assert model.iterations == 300 and not model.converged
    assert np.allclose(model.weights, weights, atol=1e-10)
    assert np.allclose(model.bias, bias, atol=1e-10)


# ---------- similarity ----------

def test_cosine_identity_and_orthogonal(rng):
    a = rng.normal(size=(5, 3))
    assert avg_cosine_similarity(a, a) == pytest.approx(1.0)
    assert avg_cosine_similarity(a, -a) == pytest.approx(-1.0)
    assert avg_cosine_similarity(np.eye(2), np.eye(2)[::-1]) == pytest.approx(0.0)


def test_cosine_matches_loop_and_is_symmetric(rng):
    a, b = rng.normal(size=(6, 4)), rng.normal(size=(6, 4))
    expected = np.mean([a[i] @ b[i] / (np.linalg.norm(a[i]) * np.linalg.norm(b[i])) for i in range(6)])
    assert avg_cosine_similarity(a, b) == pytest.approx(expected)
    assert avg_cosine_similarity(b, a) == pytest.approx(expected)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 30), st.integers(1, 8))
def test_cosine_matches_row_loop(seed, rows, cols):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(rows, cols)), rng.normal(size=(rows, cols))
    a[rng.uniform(size=rows) < 0.1] = 0.0
    kept = [
        float(a[i] @ b[i]) / (np.linalg.norm(a[i]) * np.linalg.norm(b[i]))
        for i in range(rows)
        if np.linalg.norm(a[i]) > 0 and np.linalg.norm(b[i]) > 0
    ]
    assume(kept)
    assert avg_cosine_similarity(a, b) == pytest.approx(sum(kept) / len(kept), abs=1e-12)


def test_cosine_skips_zero_rows():
    a = np.array([[1.0, 0.0], [0.0, 0.0]])
    assert avg_cosine_similarity(a, a) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        avg_cosine_similarity(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ShapeError):
        avg_cosine_similarity(np.zeros((2, 2)), np.zeros((3, 2)))


# ---------- experiments ----------

def test_gain_and_summary():
    assert gain(1.05, 1.0) == pytest.approx(5.0)
    assert gain(0.9, 1.0) == pytest.approx(-10.0)
    with pytest.raises(ValueError):
        gain(1.0, 0.0)
    summary = summarize([1.0, 3.0])
    assert summary.mean == 2.0 and summary.std == 1.0
    assert metric_key("q", 5) == "q@K5"


def test_apply_gains_only_touches_headline_metrics():
    def report(variant, q, pos):
        return ExperimentReport(
            protocol="clustering", variant=variant, repeats=1, seed=0, config={},
            metrics={"q@K5": MetricSummary(mean=q, std=0.0, runs=[q]), "pos_in@K5": MetricSummary(mean=pos, std=0.0, runs=[pos])},
        )

    out = apply_gains(report("kasgcn-bspline", 1.1, 0.5), report("sgcn", 1.0, 0.4))
    assert out.gains == pytest.approx({"q@K5": 10.0})
    assert out.baseline_variant == "sgcn"


def test_single_repeat_has_zero_std(planted):
    g, _ = planted
    report, outcomes = run_experiment(
        g, "clustering", tiny_model_config(layer_dims=[4]), TrainConfig(epochs=2), repeats=1, ks=[2, 3],
    )
    assert set(report.metrics) == {f"{m}@K{k}" for m in ("pos_in", "neg_out", "q") for k in (2, 3)}
    assert all(summary.std == 0.0 for summary in report.metrics.values())
    assert outcomes[0].seed == 42
    assert "timings" not in report.model_dump()


def test_repeats_use_consecutive_seeds(planted):
    g, _ = planted
    report, outcomes = run_experiment(g, "linksign", tiny_model_config(layer_dims=[4]), TrainConfig(epochs=2, seed=5), repeats=2)
    assert [o.seed for o in outcomes] == [5, 6]
    assert set(report.metrics) == {"auc", "f1"}


def test_experiment_is_reproducible(planted):
    g, _ = planted
    args = (g, "similarity", tiny_model_config("kasgcn-fourier", layer_dims=[4]), TrainConfig(epochs=2))
    a, _ = run_experiment(*args, repeats=1, other_variant="sgcn")
    b, _ = run_experiment(*args, repeats=1, other_variant="sgcn")
    assert a.model_dump() == b.model_dump()


def test_run_experiment_rejects_bad_arguments(small_graph):
    with pytest.raises(ValueError):
        run_experiment(small_graph, "ranking", tiny_model_config(), TrainConfig(epochs=1))
    with pytest.raises(ValueError):
        run_experiment(small_graph, "clustering", tiny_model_config(), TrainConfig(epochs=1), repeats=0)


def test_compare_variants_and_tables(planted):
    g, _ = planted
    reports = compare_variants(
        g, "clustering", tiny_model_config(layer_dims=[4]), TrainConfig(epochs=2),
        variants=["kasgcn-bspline", "sgcn"], repeats=1, ks=[5],
    )
    assert list(reports) == ["sgcn", "kasgcn-bspline"]
    assert "q@K5" in reports["kasgcn-bspline"].gains
    assert reports["sgcn"].gains == {}

    frame = clustering_frame(reports, 5, dataset="Congress")
    assert frame["Model"].tolist() == ["sgcn", "kasgcn-bspline", "sgcn (published)", "kasgcn-bspline (published)"]
    assert "±" in render(frame)
    assert linksign_frame({}, dataset="Congress").shape[0] == 2
    assert similarity_frame({}).shape[0] == 0
    assert timings_frame({"sgcn": [(2, 0.5), (3, 0.7)]}).shape[0] == 2
