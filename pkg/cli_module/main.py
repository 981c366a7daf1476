from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import functools
import logging

import click
import numpy as np
from pydantic import ValidationError

from cli_module import settings
from cli_module.models import RunConfig, SyntheticSpec
from cli_module.utilities import (
    dataset_label,
    merge_config,
    output_prefix,
    parse_override,
    read_config_file,
    write_embeddings,
    write_json,
    write_loss_curve,
    write_manifest,
    write_text,
)
from constants_module.constants import KASGCN_BSPLINE, SGCN, TASKS, VARIANTS
from eval_module.experiment import ExperimentReport, compare_variants, run_experiment
from eval_module.tables import clustering_frame, linksign_frame, render, similarity_frame, timings_frame
from graphstore_module.graphstore import SignedGraph, load_edge_list, preprocess
from graphstore_module.stats_engine import graph_stats, stats_table
from graphstore_module.synthetic import expected_pct_negative, fixture_graph, write_synthetic
from kan_module.layers import KanConfig
from sgcn_module.model import ModelConfig, init_model, model_features, normalize_variant
from tensorcore_module.gradcheck import gradcheck
from tensorcore_module.tensor import Tensor
from train_module.objective import model_loss, sample_training_pairs
from train_module.trainer import RunArtifacts, time_sweep, train


logger = logging.getLogger(__name__)

GRADCHECK_TOLERANCE = 1e-4
RUNTIME_ERRORS = (ValueError, RuntimeError, OSError, FloatingPointError, KeyError)


def cli_errors(fn):
    """Validation problems exit with 2, everything else that goes wrong at runtime with 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            raise click.UsageError(str(exc)) from exc
        except click.ClickException:
            raise
        except RUNTIME_ERRORS as exc:
            logger.debug("command_failed", exc_info=True)
            raise click.ClickException(str(exc)) from exc

    return wrapper


def load_graph(path: str, delimiter: str = "auto", skip_header: bool = False) -> SignedGraph:
    graph = preprocess(load_edge_list(path, delimiter=delimiter, skip_header=skip_header))
    if graph.num_edges == 0:
        raise ValueError(f"Dataset {path} has no usable edges")
    logger.info("dataset_loaded path=%s nodes=%s edges=%s", path, graph.n, graph.num_edges)
    return graph


@click.group()
@click.option("--log-level", default=None, help="Overrides KASGCN_LOG_LEVEL.")
def cli(log_level: Optional[str]) -> None:
    """Signed graph convolution (SGCN) and KAN-based variants: training, evaluation and dataset tools."""
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


# ---- stats ----

@cli.command()
@click.argument("datasets", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--delimiter", default="auto", show_default=True)
@click.option("--skip-header", is_flag=True)
@click.option("--compare-published", is_flag=True, help="Print the published row next to known datasets.")
@click.option("--output-dir", default=None, help="Overrides KASGCN_OUTPUT_DIR.")
@cli_errors
def stats(datasets: Sequence[str], delimiter: str, skip_header: bool, compare_published: bool, output_dir: Optional[str]) -> None:
    """Dataset statistics: vertices, edges, cycles, density, triads, degrees, % negative."""
    rows = {}
    for path in datasets:
        rows[Path(path).stem] = graph_stats(load_graph(path, delimiter, skip_header))
    out = Path(output_dir or settings.OUTPUT_DIR)
    table = stats_table(rows, compare_published)
    for name, row in rows.items():
        write_json(out / f"{name}_stats.json", row.model_dump())
    write_text(out / "stats_table.txt", table)
    click.echo(table)


# ---- run ----

def _save_run(out: Path, prefix: str, run: RunArtifacts) -> None:
    write_embeddings(out / f"{prefix}_embeddings.csv", run.embeddings)
    write_loss_curve(out / f"{prefix}_loss.csv", run.loss_curve)
    run.state.save(out / f"{prefix}_checkpoint.npz")


def _report_payload(report: ExperimentReport) -> Dict[str, Any]:
    return report.model_dump(mode="json")


def _experiment(
    config: RunConfig,
    g: SignedGraph,
    protocol: str,
    out: Path,
    name: str,
    task: str,
    progress: bool,
) -> Dict[str, ExperimentReport]:
    model_config, train_config = config.model(), config.training()
    prefix = output_prefix(name, config.variant, task, config.seed)
    kwargs = dict(
        repeats=config.repeats,
        ks=config.ks,
        test_size=config.test_size,
        strict=config.strict,
        jobs=config.jobs,
        progress=progress,
    )
    if protocol == "similarity":
        other = config.compare_variant
        if other == config.variant:
            other = KASGCN_BSPLINE if config.variant == SGCN else SGCN
        reports = {}
        report, _ = run_experiment(g, "similarity", model_config, train_config, other_variant=other, **kwargs)
        reports[config.variant] = report
    elif config.compare:
        reports = compare_variants(g, protocol, model_config, train_config, VARIANTS, **kwargs)
    else:
        report, outcomes = run_experiment(g, protocol, model_config, train_config, keep_first=True, **kwargs)
        reports = {config.variant: report}
        if outcomes[0].artifacts is not None:
            _save_run(out, prefix, outcomes[0].artifacts)

    write_json(out / f"{prefix}_report.json", {variant: _report_payload(r) for variant, r in reports.items()})
    write_json(out / f"{prefix}_timings.json", {variant: r.timings for variant, r in reports.items()})
    if protocol == "clustering":
        table = "\n\n".join(f"K = {k}\n" + render(clustering_frame(reports, k, name)) for k in config.ks)
    elif protocol == "linksign":
        table = render(linksign_frame(reports, name))
    else:
        table = render(similarity_frame(reports, name))
    write_text(out / f"{prefix}_table.txt", table)
    click.echo(table)
    return reports


def execute_run(config: RunConfig, progress: bool = False) -> Path:
    out = Path(config.output_dir)
    name = dataset_label(config)
    g = load_graph(config.dataset, config.delimiter, config.skip_header)
    tasks = [t for t in TASKS if t != "all"] if config.task == "all" else [config.task]
    write_manifest(out / f"{output_prefix(name, config.variant, config.task, config.seed)}_manifest.toml", config)

    for task in tasks:
        prefix = output_prefix(name, config.variant, task, config.seed)
        if task == "stats":
            row = graph_stats(g)
            write_json(out / f"{prefix}_stats.json", row.model_dump())
            click.echo(stats_table({name: row}, compare_published=True))
        elif task == "train":
            run = train(g, config.model(), config.training(), progress=progress)
            _save_run(out, prefix, run)
            write_json(out / f"{prefix}_timings.json", {config.variant: [run.wall_clock_seconds]})
            click.echo(f"{config.variant}: final loss {run.final_loss:.6f} in {run.wall_clock_seconds:.2f}s")
        elif task == "cluster":
            _experiment(config, g, "clustering", out, name, task, progress)
        elif task in ("linksign", "similarity"):
            _experiment(config, g, task, out, name, task, progress)
        elif task == "timesweep":
            variants = [SGCN, config.variant] if config.variant != SGCN else [SGCN, KASGCN_BSPLINE]
            sweeps = {v: time_sweep(g, v, config.timesweep_layers, config.model(), config.training()) for v in variants}
            write_json(out / f"{prefix}_timings.json", {v: [list(p) for p in points] for v, points in sweeps.items()})
            click.echo(render(timings_frame(sweeps)))
    return out


@cli.command()
@click.argument("dataset", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="TOML config or manifest.")
@click.option("--variant", default=None)
@click.option("--task", default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--repeats", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--output-dir", default=None)
@click.option("--jobs", type=int, default=None, help="Worker processes for experiment repeats.")
@click.option("--strict", is_flag=True, help="Train link-sign embeddings on train edges only.")
@click.option("--compare", is_flag=True, help="Run SGCN and all KASGCN variants side by side.")
@click.option("--progress", is_flag=True, help="Per-epoch progress bar.")
@click.option("--set", "overrides", multiple=True, help="Any config key, e.g. --set lamb=0.5.")
@cli_errors
def run(dataset, config_path, variant, task, epochs, repeats, seed, output_dir, jobs, strict, compare, progress, overrides) -> None:
    """Train and evaluate one configuration; writes reports, embeddings and a manifest."""
    file_values = read_config_file(config_path) if config_path else {}
    flags = dict(
        dataset=dataset, variant=variant, task=task, epochs=epochs, repeats=repeats, seed=seed,
        output_dir=output_dir, jobs=jobs, strict=strict or None, compare=compare or None,
    )
    file_values.setdefault("output_dir", settings.OUTPUT_DIR)
    file_values.setdefault("jobs", settings.JOBS)
    flags.update(dict(parse_override(item) for item in overrides))
    config = merge_config(file_values, flags)
    out = execute_run(config, progress=progress or settings.PROGRESS)
    click.echo(f"Outputs written to {out}")


# ---- synth ----

@cli.command()
@click.argument("output", type=click.Path(dir_okay=False))
@click.option("--blocks", type=int, default=2, show_default=True)
@click.option("--nodes-per-block", type=int, default=20, show_default=True)
@click.option("--p-within-positive", type=float, default=1.0, show_default=True)
@click.option("--p-between-negative", type=float, default=1.0, show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@cli_errors
def synth(output, blocks, nodes_per_block, p_within_positive, p_between_negative, noise, seed) -> None:
    """Planted-partition signed graph plus a ground-truth labels sidecar."""
    spec = SyntheticSpec(
        blocks=blocks,
        nodes_per_block=nodes_per_block,
        p_within_positive=p_within_positive,
        p_between_negative=p_between_negative,
        noise=noise,
        seed=seed,
    )
    edges_path, labels_path = write_synthetic(spec, output)
    click.echo(f"Wrote {edges_path} and {labels_path} (expected % negative {expected_pct_negative(spec):.2f})")


# ---- timesweep ----

@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--variant", "variants", multiple=True, help="Repeatable; defaults to SGCN and KASGCN-Bspline.")
@click.option("--layers", "layer_counts", multiple=True, type=int, help="Repeatable; defaults to 2, 3, 4.")
@click.option("--epochs", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--output-dir", default=None)
@cli_errors
def timesweep(dataset, variants, layer_counts, epochs, seed, output_dir) -> None:
    """Wall-clock embedding generation time over aggregator layer counts."""
    config = merge_config(
        {"output_dir": settings.OUTPUT_DIR},
        dict(dataset=dataset, epochs=epochs, seed=seed, output_dir=output_dir, task="timesweep"),
    )
    if layer_counts:
        config = config.model_copy(update={"timesweep_layers": list(layer_counts)})
    g = load_graph(config.dataset, config.delimiter, config.skip_header)
    names = [normalize_variant(v) for v in variants] or [SGCN, KASGCN_BSPLINE]
    sweeps = {v: time_sweep(g, v, config.timesweep_layers, config.model(), config.training()) for v in names}
    prefix = output_prefix(dataset_label(config), "-".join(names), "timesweep", config.seed)
    out = Path(config.output_dir)
    write_json(out / f"{prefix}_timings.json", {v: [list(p) for p in points] for v, points in sweeps.items()})
    table = render(timings_frame(sweeps))
    write_text(out / f"{prefix}_table.txt", table)
    click.echo(table)


# ---- gradcheck ----

def gradcheck_variant(variant: str, seed: int = 42) -> float:
    """Max relative finite-difference error of the full training loss on the six-node fixture."""
    g = fixture_graph()
    config = ModelConfig(
        layer_dims=[3, 2],
        variant=variant,
        feature_dim=3,
        seed=seed,
        kan=KanConfig(grid_size=3, spline_order=2),
    )
    state = init_model(config)
    h0 = Tensor(model_features(config, g))
    rng = np.random.default_rng(seed)
    sample = sample_training_pairs(g, rng)
    errors = gradcheck(lambda: model_loss(state, g, h0, sample, 1.0), state.parameters())
    return max(errors.values())


@cli.command(name="gradcheck")
@click.option("--variant", "variants", multiple=True, help="Repeatable; defaults to every variant.")
@click.option("--seed", type=int, default=42, show_default=True)
@cli_errors
def gradcheck_command(variants, seed) -> None:
    """Compare backprop gradients to central differences for each variant."""
    names: List[str] = [normalize_variant(v) for v in variants] or list(VARIANTS)
    failed = []
    for name in names:
        error = gradcheck_variant(name, seed)
        status = "ok" if error < GRADCHECK_TOLERANCE else "FAIL"
        click.echo(f"{name:<16} max_rel_error={error:.3e} {status}")
        if error >= GRADCHECK_TOLERANCE:
            failed.append(name)
    if failed:
        raise click.ClickException(f"Gradient check failed for: {', '.join(failed)}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
