from eval_module.clustering import ClusterAssignment, ClusterQuality, cluster_quality, kmeanspp
from eval_module.experiment import ExperimentReport, MetricSummary, compare_variants, gain, run_experiment
from eval_module.linksign import (
    LinkSignReport,
    auc,
    edge_features,
    evaluate_link_sign,
    f1,
    logreg_fit,
    predict,
    predict_proba,
)
from eval_module.similarity import avg_cosine_similarity


__all__ = [
    "ClusterAssignment",
    "ClusterQuality",
    "ExperimentReport",
    "LinkSignReport",
    "MetricSummary",
    "auc",
    "avg_cosine_similarity",
    "cluster_quality",
    "compare_variants",
    "edge_features",
    "evaluate_link_sign",
    "f1",
    "gain",
    "kmeanspp",
    "logreg_fit",
    "predict",
    "predict_proba",
    "run_experiment",
]
