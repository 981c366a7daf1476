from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Mapping, Sequence, Tuple
import logging

import numpy as np
import orjson
import pandas as pd
import toml

from cli_module.models import RunConfig


logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def dataset_label(config: RunConfig) -> str:
    return config.dataset_name or Path(config.dataset).stem


def output_prefix(dataset: str, variant: str, task: str, seed: int) -> str:
    return f"{dataset}_{variant}_{task}_{seed}"


def write_json(path: str | Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(payload, option=JSON_OPTIONS) + b"\n")
    logger.info("report_written path=%s", path)
    return path


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text.rstrip("\n") + "\n", encoding="utf-8")
    return path


def write_embeddings(path: str | Path, emb: np.ndarray) -> Path:
    frame = pd.DataFrame(emb, columns=[f"z{i}" for i in range(emb.shape[1])])
    frame.insert(0, "node_id", np.arange(emb.shape[0]))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def write_loss_curve(path: str | Path, curve: Sequence[float]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"epoch": np.arange(len(curve)), "loss": np.asarray(curve)}).to_csv(path, index=False)
    return path


def write_manifest(path: str | Path, config: RunConfig) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        toml.dump(config.model_dump(mode="json", exclude_none=True), fh)
    return path


def read_config_file(path: str | Path) -> Dict[str, Any]:
    try:
        return dict(toml.load(Path(path)))
    except toml.TomlDecodeError as exc:
        raise ValueError(f"Cannot parse config file {path}: {exc}") from exc


def parse_override(item: str) -> Tuple[str, Any]:
    """`key=value` with the value read as a TOML literal, falling back to a bare string."""
    if "=" not in item:
        raise ValueError(f"Override {item!r} must look like key=value")
    key, raw = item.split("=", 1)
    try:
        value = toml.loads(f"value = {raw.strip()}")["value"]
    except toml.TomlDecodeError:
        value = raw.strip()
    return key.strip(), value


def merge_config(file_values: Mapping[str, Any], overrides: Mapping[str, Any]) -> RunConfig:
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**merged)
