from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple
import logging

import numpy as np
from pydantic import BaseModel, Field

from constants_module.constants import CLUSTER_KS, REPEATS, SGCN, TEST_SIZE, VARIANTS
from eval_module.clustering import cluster_quality, kmeanspp
from eval_module.linksign import evaluate_link_sign
from eval_module.similarity import avg_cosine_similarity
from graphstore_module.graphstore import SignedGraph, split_edges, subgraph
from sgcn_module.model import ModelConfig, normalize_variant
from train_module.trainer import RunArtifacts, TrainConfig, train


logger = logging.getLogger(__name__)

Protocol = Literal["clustering", "linksign", "similarity"]
PROTOCOLS = ("clustering", "linksign", "similarity")

# Metrics compared against the baseline model in the gain columns.
GAIN_METRICS = {
    "clustering": ("q",),
    "linksign": ("auc", "f1"),
    "similarity": (),
}


class MetricSummary(BaseModel):
    mean: float
    std: float = Field(ge=0.0)
    runs: List[float]


class ExperimentReport(BaseModel):
    protocol: str
    variant: str
    repeats: int = Field(ge=1)
    seed: int
    config: Dict[str, Any]
    metrics: Dict[str, MetricSummary]
    gains: Dict[str, float] = Field(default_factory=dict)
    baseline_variant: Optional[str] = None
    # wall-clock seconds per run; kept out of the metric JSON so reruns compare byte for byte
    timings: List[float] = Field(default_factory=list, exclude=True)


@dataclass
class RunTask:
    protocol: str
    graph: SignedGraph
    model_config: ModelConfig
    train_config: TrainConfig
    run_index: int
    ks: Sequence[int]
    test_size: float
    strict: bool
    other_variant: Optional[str]
    features: Optional[np.ndarray]
    keep_artifacts: bool
    progress: bool


@dataclass
class RunOutcome:
    run_index: int
    seed: int
    metrics: Dict[str, float]
    seconds: float
    artifacts: Optional[RunArtifacts] = None


def metric_key(name: str, k: Optional[int] = None) -> str:
    return name if k is None else f"{name}@K{k}"


def gain(value: float, baseline: float) -> float:
    """Percentage improvement of `value` over `baseline`."""
    if baseline == 0:
        raise ValueError("gain is undefined for a zero baseline")
    return 100.0 * (value - baseline) / baseline


def summarize(values: Sequence[float]) -> MetricSummary:
    arr = np.asarray(values, dtype=np.float64)
    return MetricSummary(mean=float(arr.mean()), std=float(arr.std(ddof=0)), runs=[float(v) for v in arr])


def _seeded(task: RunTask, variant: Optional[str] = None):
    seed = task.train_config.seed + task.run_index
    model_updates: Dict[str, Any] = {"seed": seed}
    if variant is not None:
        model_updates["variant"] = variant
    return seed, task.model_config.model_copy(update=model_updates), task.train_config.model_copy(update={"seed": seed})


def _run_once(task: RunTask) -> RunOutcome:
    seed, model_config, train_config = _seeded(task)
    metrics: Dict[str, float] = {}

    if task.protocol == "clustering":
        run = train(task.graph, model_config, train_config, features=task.features, progress=task.progress)
        for k in task.ks:
            quality = cluster_quality(task.graph, kmeanspp(run.embeddings, k, seed).labels)
            metrics[metric_key("pos_in", k)] = quality.pos_in
            metrics[metric_key("neg_out", k)] = quality.neg_out
            metrics[metric_key("q", k)] = quality.q
        seconds = run.wall_clock_seconds

    elif task.protocol == "linksign":
        split = split_edges(task.graph, task.test_size, seed)
        graph = subgraph(task.graph, split.train_edges) if task.strict else task.graph
        features = None if task.strict else task.features
        run = train(graph, model_config, train_config, features=features, progress=task.progress)
        report = evaluate_link_sign(run.embeddings, split, seed)
        metrics.update(auc=report.auc, f1=report.f1)
        seconds = run.wall_clock_seconds

    elif task.protocol == "similarity":
        run = train(task.graph, model_config, train_config, features=task.features, progress=task.progress)
        _, other_config, _ = _seeded(task, task.other_variant)
        other = train(task.graph, other_config, train_config, features=task.features, progress=task.progress)
        metrics["cosine"] = avg_cosine_similarity(run.embeddings, other.embeddings)
        seconds = run.wall_clock_seconds + other.wall_clock_seconds

    else:
        raise ValueError(f"Unknown protocol: {task.protocol}")

    logger.info("experiment_run protocol=%s run=%s seed=%s metrics=%s", task.protocol, task.run_index, seed, metrics)
    return RunOutcome(task.run_index, seed, metrics, seconds, run if task.keep_artifacts else None)


def execute_runs(tasks: Sequence[RunTask], jobs: int = 1) -> List[RunOutcome]:
    """Runs are independent, so process-pool results match sequential ones."""
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_once(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_once, tasks))


def apply_gains(report: ExperimentReport, baseline: ExperimentReport) -> ExperimentReport:
    gains: Dict[str, float] = {}
    for base in GAIN_METRICS.get(report.protocol, ()):
        for key, summary in report.metrics.items():
            if key.split("@")[0] != base or key not in baseline.metrics:
                continue
            reference = baseline.metrics[key].mean
            if reference == 0:
                logger.warning("gain_skipped metric=%s reason=zero_baseline", key)
                continue
            gains[key] = gain(summary.mean, reference)
    return report.model_copy(update={"gains": gains, "baseline_variant": baseline.variant})


def run_experiment(
    g: SignedGraph,
    protocol: Protocol,
    model_config: ModelConfig,
    train_config: TrainConfig,
    repeats: int = REPEATS,
    ks: Sequence[int] = CLUSTER_KS,
    test_size: float = TEST_SIZE,
    strict: bool = False,
    other_variant: Optional[str] = None,
    baseline: Optional[ExperimentReport] = None,
    features: Optional[np.ndarray] = None,
    jobs: int = 1,
    keep_first: bool = False,
    progress: bool = False,
) -> Tuple[ExperimentReport, List[RunOutcome]]:
    """Repeat a protocol with seeds seed, seed+1, ... and aggregate mean and std per metric."""
    if protocol not in PROTOCOLS:
        raise ValueError(f"Unknown protocol {protocol!r}; expected one of {PROTOCOLS}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    if protocol == "clustering" and not ks:
        raise ValueError("clustering needs at least one K")
    if train_config.variant is not None:
        model_config = model_config.model_copy(update={"variant": train_config.variant})
    if protocol == "similarity":
        other_variant = normalize_variant(other_variant or SGCN)

    tasks = [
        RunTask(
            protocol, g, model_config, train_config, r, list(ks), test_size, strict,
            other_variant, features, keep_first and r == 0, progress,
        )
        for r in range(repeats)
    ]
    outcomes = execute_runs(tasks, jobs)
    keys = list(outcomes[0].metrics)
    config_echo: Dict[str, Any] = {
        "model": model_config.model_dump(mode="json"),
        "train": train_config.model_dump(mode="json"),
        "ks": list(ks) if protocol == "clustering" else [],
        "test_size": test_size if protocol == "linksign" else None,
        "strict": strict,
        "other_variant": other_variant,
    }
    report = ExperimentReport(
        protocol=protocol,
        variant=model_config.variant,
        repeats=repeats,
        seed=train_config.seed,
        config=config_echo,
        metrics={key: summarize([o.metrics[key] for o in outcomes]) for key in keys},
        timings=[o.seconds for o in outcomes],
    )
    if baseline is not None:
        report = apply_gains(report, baseline)
    logger.info("experiment_finished protocol=%s variant=%s repeats=%s", protocol, report.variant, repeats)
    return report, outcomes


def compare_variants(
    g: SignedGraph,
    protocol: Protocol,
    model_config: ModelConfig,
    train_config: TrainConfig,
    variants: Sequence[str] = VARIANTS,
    **kwargs,
) -> Dict[str, ExperimentReport]:
    """Run one protocol for every variant; non-baseline reports carry gains against SGCN."""
    ordered = [normalize_variant(v) for v in variants]
    if SGCN in ordered:
        ordered = [SGCN] + [v for v in ordered if v != SGCN]
    reports: Dict[str, ExperimentReport] = {}
    baseline: Optional[ExperimentReport] = None
    for variant in ordered:
        report, _ = run_experiment(
            g, protocol,
            model_config.model_copy(update={"variant": variant}),
            train_config.model_copy(update={"variant": None}),
            baseline=baseline,
            **kwargs,
        )
        if variant == SGCN:
            baseline = report
        reports[variant] = report
    return reports
