"""Dataset ingestion, normalization and windowing."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np
import pandas as pd

from stuq.config import WindowSchema
from stuq.core.errors import ParseError, ShapeError, ValidationError
from stuq.core.windows import TrainingData, WindowSet
from stuq.spatial.graph import SpatialGraph
from stuq.spatial.io import read_matrix_csv, read_numeric_csv, write_matrix_csv

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SPLITS = ("train", "validation", "test")


@dataclass
class NormalizationStats:
    """Per-feature mean and standard deviation, shape (D,) each."""
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def from_values(cls, values: np.ndarray, mask: np.ndarray) -> "NormalizationStats":
        """Statistics over the observed entries of (T, P, D) values.

        A feature with no spread keeps unit scale; one with no observations
        keeps zero mean as well.
        """
        features = values.shape[-1]
        mean = np.zeros(features)
        std = np.ones(features)
        for f in range(features):
            observed = values[..., f][mask[..., f]]
            if observed.size == 0:
                logger.warning(f"Feature {f} has no observed training values")
                continue
            mean[f] = observed.mean()
            spread = observed.std()
            std[f] = spread if spread > 0 else 1.0
        return cls(mean, std)

    def normalize(self, values: np.ndarray) -> np.ndarray:
        return (values - self.mean) / self.std

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        return values * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}


@dataclass
class Dataset:
    """A spatiotemporal series with its spatial structure.

    ``values`` is (T, P, D) in physical units with NaN marking missing cells.
    Grid datasets order nodes row-major over (width, height). Normalization
    statistics come from the training rows only.
    """
    values: np.ndarray
    timestamps: list[str]
    node_ids: list[str]
    schema: WindowSchema = field(default_factory=WindowSchema)
    graph: Optional[SpatialGraph] = None
    grid_shape: Optional[tuple[int, int]] = None
    ground_truth: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 3:
            raise ShapeError(f"Series must be (T, P, D), got shape {self.values.shape}")
        steps, nodes, _ = self.values.shape
        if len(self.timestamps) != steps:
            raise ShapeError(f"{len(self.timestamps)} timestamps for {steps} steps")
        if len(self.node_ids) != nodes:
            raise ShapeError(f"{len(self.node_ids)} node ids for {nodes} nodes")
        if np.any(np.isinf(self.values)):
            raise ValidationError("Series contains infinite values")
        if self.graph is not None and self.graph.node_count != nodes:
            raise ValidationError(f"Adjacency has {self.graph.node_count} nodes, expected P = {nodes}")
        if self.grid_shape is not None:
            self.grid_shape = tuple(int(v) for v in self.grid_shape)
            if self.grid_shape[0] * self.grid_shape[1] != nodes:
                raise ValidationError(f"Grid {self.grid_shape} does not cover P = {nodes} nodes")
        self.mask = np.isfinite(self.values)
        train_start, train_end = self.split_bounds()[0]
        self.stats = NormalizationStats.from_values(
            self.values[train_start:train_end], self.mask[train_start:train_end]
        )

    @property
    def steps(self) -> int:
        return self.values.shape[0]

    @property
    def nodes(self) -> int:
        return self.values.shape[1]

    @property
    def features(self) -> int:
        return self.values.shape[2]

    def split_bounds(self) -> list[tuple[int, int]]:
        """[start, end) time ranges of the train, validation and test splits."""
        train = int(round(self.steps * self.schema.split[0]))
        validation = train + int(round(self.steps * self.schema.split[1]))
        return [(0, train), (train, validation), (validation, self.steps)]

    def window_starts(self, split: Optional[str] = None) -> np.ndarray:
        """Start indices of windows lying wholly inside ``split`` (or the whole series).

        Starts are multiples of the stride on the global time index.
        """
        if split is None:
            start, end = 0, self.steps
        else:
            if split not in SPLITS:
                raise ValidationError(f"Unknown split: {split}")
            start, end = self.split_bounds()[SPLITS.index(split)]
        first = -(-start // self.schema.stride) * self.schema.stride
        return np.arange(first, end - self.schema.span + 1, self.schema.stride, dtype=np.int64)

    def window_count(self, split: Optional[str] = None) -> int:
        return len(self.window_starts(split))

    def normalize(self, values: np.ndarray) -> np.ndarray:
        return self.stats.normalize(values)

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        return self.stats.denormalize(values)

    def windows(self, split: Optional[str] = None) -> WindowSet:
        """Normalized (history, target) windows; missing cells are zero-filled and masked."""
        starts = self.window_starts(split)
        filled = np.where(self.mask, self.normalize(np.nan_to_num(self.values)), 0.0)
        history = starts[:, None] + np.arange(self.schema.history_length)
        future = starts[:, None] + self.schema.history_length + np.arange(self.schema.horizon)
        return WindowSet(filled[history], filled[future], self.mask[future])

    def training_data(self) -> TrainingData:
        return TrainingData(self.windows("train"), self.windows("validation"))

    def target_times(self, split: str = "test") -> list[list[str]]:
        """Timestamp of every target step, per window."""
        starts = self.window_starts(split) + self.schema.history_length
        return [[self.timestamps[s + h] for h in range(self.schema.horizon)] for s in starts]


def _parse_times(column: pd.Series) -> pd.Series:
    """Numeric timestamps when every cell is a number, datetimes otherwise."""
    numeric = pd.to_numeric(column, errors="coerce")
    if not numeric.isna().any():
        return numeric
    parsed = pd.to_datetime(column, errors="coerce")
    if parsed.isna().any():
        row = int(np.flatnonzero(parsed.isna().to_numpy())[0])
        raise ParseError(f"Unreadable timestamp {column.iloc[row]!r}", line=row + 2)
    return parsed


def load_dataset(
    path: PathLike,
    schema: Optional[WindowSchema] = None,
    adjacency: Optional[PathLike] = None,
    grid_shape: Optional[tuple[int, int]] = None,
) -> Dataset:
    """Read a long-format series CSV: ``timestamp,node_id,feat_0..feat_{D-1}``.

    One row per (timestamp, node); empty cells and absent (timestamp, node)
    pairs are masked. Graph datasets take an adjacency CSV, grid datasets a
    (width, height) shape.
    """
    schema = schema or WindowSchema()
    frame = read_numeric_csv(path, text_columns=("timestamp", "node_id"), allow_missing=True)
    columns = list(frame.columns)
    if columns[:2] != ["timestamp", "node_id"]:
        raise ParseError("Header must start with timestamp,node_id", line=1)
    features = columns[2:]
    if not features:
        raise ParseError("Header names no feature columns", line=1)
    expected = [f"feat_{i}" for i in range(len(features))]
    if features != expected:
        raise ParseError(f"Feature columns must be {','.join(expected)}", line=1)
    if frame.empty:
        raise ParseError("Dataset has no rows", line=2)
    for column in ("timestamp", "node_id"):
        blank = frame[column] == ""
        if blank.any():
            raise ParseError(f"Missing {column}", line=int(np.flatnonzero(blank.to_numpy())[0]) + 2)

    times = _parse_times(frame["timestamp"])
    previous = times.groupby(frame["node_id"]).shift()
    disorder = previous.notna() & ~(times > previous)
    if disorder.any():
        row = int(np.flatnonzero(disorder.to_numpy())[0])
        raise ParseError(
            f"Timestamps for node {frame['node_id'].iloc[row]} are not strictly increasing", line=row + 2
        )

    node_ids = list(pd.unique(frame["node_id"]))
    order = np.argsort(times.to_numpy(), kind="stable")
    unique_times, first = np.unique(times.to_numpy()[order], return_index=True)
    labels = [frame["timestamp"].iloc[order[i]] for i in first]
    time_index = np.searchsorted(unique_times, times.to_numpy())
    node_index = pd.Index(node_ids).get_indexer(frame["node_id"])

    values = np.full((len(unique_times), len(node_ids), len(features)), np.nan)
    values[time_index, node_index] = frame[features].to_numpy(dtype=np.float64)
    logger.info(
        f"Loaded {path}: T = {values.shape[0]}, P = {values.shape[1]}, D = {values.shape[2]}, "
        f"{int(np.isnan(values).sum())} missing cells"
    )

    graph = None
    if adjacency is not None:
        ids, matrix = read_matrix_csv(adjacency, expected_nodes=len(node_ids))
        if set(ids) == set(node_ids):
            position = [ids.index(n) for n in node_ids]
            matrix = matrix[np.ix_(position, position)]
        else:
            logger.warning("Adjacency header ids differ from the dataset's node ids; using file order")
        graph = SpatialGraph(matrix)
    return Dataset(values, labels, node_ids, schema, graph=graph, grid_shape=grid_shape)


def write_dataset(dataset: Dataset, directory: PathLike) -> dict[str, Path]:
    """Write ``series.csv``, ``adjacency.csv`` (graph datasets) and ``ground_truth.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    steps, nodes, features = dataset.values.shape
    frame = pd.DataFrame(
        dataset.values.reshape(steps * nodes, features),
        columns=[f"feat_{i}" for i in range(features)],
    )
    frame.insert(0, "node_id", np.tile(np.asarray(dataset.node_ids, dtype=object), steps))
    frame.insert(0, "timestamp", np.repeat(np.asarray(dataset.timestamps, dtype=object), nodes))
    paths = {"series": directory / "series.csv"}
    frame.to_csv(paths["series"], index=False, na_rep="", float_format="%.17g")
    if dataset.graph is not None:
        paths["adjacency"] = write_matrix_csv(directory / "adjacency.csv", dataset.graph.adjacency, dataset.node_ids)
    paths["ground_truth"] = directory / "ground_truth.json"
    paths["ground_truth"].write_text(json.dumps(_jsonable(dataset.ground_truth), indent=2, sort_keys=True))
    logger.info(f"Wrote dataset with {steps} steps and {nodes} nodes to {directory}")
    return paths


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def check_disjoint(dataset: Dataset, splits: Sequence[str] = SPLITS) -> None:
    """Raise when windows of different splits share a timestamp."""
    owners: dict[str, set[int]] = {}
    for split in splits:
        starts = dataset.window_starts(split)
        covered = set((starts[:, None] + np.arange(dataset.schema.span)).ravel().tolist())
        for other, seen in owners.items():
            shared = covered & seen
            if shared:
                raise ValidationError(f"Time index {min(shared)} is used by {other} and {split} windows")
        owners[split] = covered
