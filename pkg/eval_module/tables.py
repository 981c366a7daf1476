from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from constants_module.constants import CLUSTERING_REFERENCE_K5, LINKSIGN_REFERENCE, SIMILARITY_REFERENCE
from eval_module.experiment import ExperimentReport, metric_key


def cell(report: ExperimentReport, key: str, digits: int = 4) -> str:
    summary = report.metrics.get(key)
    if summary is None:
        return "-"
    return f"{summary.mean:.{digits}f} ± {summary.std:.{digits}f}"


def _gain_cell(report: ExperimentReport, key: str) -> str:
    value = report.gains.get(key)
    return "-" if value is None else f"{value:+.2f}%"


def clustering_frame(reports: Dict[str, ExperimentReport], k: int, dataset: Optional[str] = None) -> pd.DataFrame:
    records = []
    for variant, report in reports.items():
        records.append({
            "Model": variant,
            "pos": cell(report, metric_key("pos_in", k)),
            "neg": cell(report, metric_key("neg_out", k)),
            "Q": cell(report, metric_key("q", k)),
            "Gain": _gain_cell(report, metric_key("q", k)),
        })
    if dataset and k == 5:
        for variant, (pos, neg) in CLUSTERING_REFERENCE_K5.get(dataset, {}).items():
            records.append({"Model": f"{variant} (published)", "pos": f"{pos:.4f}", "neg": f"{neg:.4f}", "Q": f"{pos + neg:.4f}", "Gain": "-"})
    return pd.DataFrame.from_records(records, columns=["Model", "pos", "neg", "Q", "Gain"])


def linksign_frame(reports: Dict[str, ExperimentReport], dataset: Optional[str] = None) -> pd.DataFrame:
    records = [
        {
            "Model": variant,
            "AUC": cell(report, "auc"),
            "F1": cell(report, "f1"),
            "AUC Gain": _gain_cell(report, "auc"),
            "F1 Gain": _gain_cell(report, "f1"),
        }
        for variant, report in reports.items()
    ]
    if dataset:
        for variant, (auc, f1) in LINKSIGN_REFERENCE.get(dataset, {}).items():
            records.append({"Model": f"{variant} (published)", "AUC": f"{auc:.3f}", "F1": f"{f1:.3f}", "AUC Gain": "-", "F1 Gain": "-"})
    return pd.DataFrame.from_records(records, columns=["Model", "AUC", "F1", "AUC Gain", "F1 Gain"])


def similarity_frame(reports: Dict[str, ExperimentReport], dataset: Optional[str] = None) -> pd.DataFrame:
    records = [
        {"Pair": f"{report.variant} vs {report.config.get('other_variant')}", "Cosine": cell(report, "cosine")}
        for report in reports.values()
    ]
    if dataset and dataset in SIMILARITY_REFERENCE:
        records.append({"Pair": "published", "Cosine": f"{SIMILARITY_REFERENCE[dataset]:.3f}"})
    return pd.DataFrame.from_records(records, columns=["Pair", "Cosine"])


def timings_frame(sweeps: Dict[str, Sequence[Tuple[int, float]]]) -> pd.DataFrame:
    records: List[dict] = [
        {"Model": variant, "Layers": layers, "Seconds": round(seconds, 3)}
        for variant, points in sweeps.items()
        for layers, seconds in points
    ]
    return pd.DataFrame.from_records(records, columns=["Model", "Layers", "Seconds"])


def render(frame: pd.DataFrame) -> str:
    return frame.to_string(index=False)
