"""Raw forecast artifacts and model checkpoints.

Arrays are stored as flat little-endian float64 ``.bin`` files next to a
JSON sidecar giving shape and dtype. Every file is written to a temporary
name in the same directory and renamed into place.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np

from stuq.core.errors import ValidationError
from stuq.methods.base import ProbabilisticForecast
from stuq.models.base import ModelConfig, RecurrentForecaster

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DTYPE = "<f8"
FORECAST_ARRAYS = ("mean", "lower", "upper", "samples", "truth", "mask")


def atomic_write_bytes(path: PathLike, payload: bytes) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "wb") as out:
            out.write(payload)
        os.replace(temp, path)
    except BaseException:
        if os.path.exists(temp):
            os.unlink(temp)
        raise
    return path


def atomic_write_json(path: PathLike, data: Any) -> Path:
    return atomic_write_bytes(path, json.dumps(data, indent=2, sort_keys=True).encode())


def _array_paths(stem: PathLike) -> tuple[Path, Path]:
    # Parameter names contain dots, so suffixes are appended rather than replaced.
    stem = Path(stem)
    return stem.parent / f"{stem.name}.json", stem.parent / f"{stem.name}.bin"


def write_array(stem: PathLike, array: np.ndarray) -> Path:
    """``stem.bin`` plus ``stem.json``; returns the ``.bin`` path."""
    sidecar, data = _array_paths(stem)
    array = np.ascontiguousarray(array, dtype=DTYPE)
    atomic_write_json(sidecar, {"shape": list(array.shape), "dtype": DTYPE, "order": "C"})
    return atomic_write_bytes(data, array.tobytes(order="C"))


def read_array(stem: PathLike) -> np.ndarray:
    sidecar, data = _array_paths(stem)
    if not sidecar.is_file() or not data.is_file():
        raise ValidationError(f"Missing array artifact: {stem}")
    meta = json.loads(sidecar.read_text())
    array = np.frombuffer(data.read_bytes(), dtype=np.dtype(meta["dtype"]))
    expected = int(np.prod(meta["shape"]))
    if array.size != expected:
        raise ValidationError(f"{data} holds {array.size} values, sidecar expects {expected}")
    return array.reshape(meta["shape"]).astype(np.float64)


@dataclass
class ForecastArtifact:
    """Denormalized test forecasts with their ground truth, as stored on disk."""
    method: str
    rho: float
    arrays: dict[str, np.ndarray]
    node_ids: list[str] = field(default_factory=list)
    target_times: list[list[str]] = field(default_factory=list)

    @property
    def has_interval(self) -> bool:
        return "lower" in self.arrays

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]


def write_forecast(
    directory: PathLike,
    forecast: ProbabilisticForecast,
    truth: np.ndarray,
    mask: np.ndarray,
    node_ids: Optional[list[str]] = None,
    target_times: Optional[list[list[str]]] = None,
    keep_samples: bool = True,
) -> Path:
    """Store a forecast already in physical units under ``directory/forecast``."""
    directory = Path(directory) / "forecast"
    arrays = {
        "mean": forecast.mean,
        "lower": forecast.lower,
        "upper": forecast.upper,
        "samples": forecast.samples if keep_samples else None,
        "truth": np.where(mask, truth, np.nan),
        "mask": mask.astype(np.float64),
    }
    stored = [name for name in FORECAST_ARRAYS if arrays[name] is not None]
    for name in stored:
        write_array(directory / name, arrays[name])
    atomic_write_json(directory / "forecast.json", {
        "method": forecast.method.value,
        "rho": forecast.rho,
        "arrays": stored,
        "node_ids": list(node_ids or []),
        "target_times": target_times or [],
    })
    logger.debug(f"Wrote {len(stored)} forecast arrays to {directory}")
    return directory


def read_forecast(directory: PathLike) -> ForecastArtifact:
    directory = Path(directory)
    if directory.name != "forecast":
        directory = directory / "forecast"
    index = directory / "forecast.json"
    if not index.is_file():
        raise ValidationError(f"Missing raw-forecast artifact in {directory.parent}")
    meta = json.loads(index.read_text())
    arrays = {name: read_array(directory / name) for name in meta["arrays"]}
    arrays["mask"] = arrays["mask"].astype(bool)
    return ForecastArtifact(meta["method"], meta["rho"], arrays, meta["node_ids"], meta["target_times"])


def save_checkpoint(directory: PathLike, model: RecurrentForecaster, extra: Optional[Mapping[str, Any]] = None) -> Path:
    """Parameter arrays plus ``model.json`` with the architecture."""
    directory = Path(directory) / "checkpoint"
    snapshot = model.snapshot()
    for name, value in snapshot.items():
        write_array(directory / name, value)
    atomic_write_json(directory / "model.json", {
        "config": model.config.to_dict(),
        "parameters": sorted(snapshot),
        **dict(extra or {}),
    })
    logger.info(f"Saved checkpoint with {model.parameter_count} parameters to {directory}")
    return directory


def load_checkpoint(directory: PathLike) -> tuple[ModelConfig, dict[str, np.ndarray], dict[str, Any]]:
    directory = Path(directory)
    if directory.name != "checkpoint":
        directory = directory / "checkpoint"
    index = directory / "model.json"
    if not index.is_file():
        raise ValidationError(f"No checkpoint in {directory.parent}")
    meta = json.loads(index.read_text())
    snapshot = {name: read_array(directory / name) for name in meta.pop("parameters")}
    return ModelConfig.from_dict(meta.pop("config")), snapshot, meta
