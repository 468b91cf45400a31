"""Results records: schema, validation, disk storage and the MongoDB mirror."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Union

from pymongo import MongoClient
from pymongo.collection import Collection

from stuq.core.enums import MethodTag
from stuq.core.errors import ValidationError
from stuq.scoring.metrics import METRIC_NAMES, MetricBundle

from .artifacts import atomic_write_json

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

RECORD_FILE = "record.json"

_NULLABLE_NUMBER = {"type": ["number", "null"]}
_FRACTION = {"type": ["number", "null"], "minimum": 0, "maximum": 1}

METRIC_SCHEMA = {
    "type": "object",
    "required": [*METRIC_NAMES, "count"],
    "properties": {
        "mae": {"type": "number", "minimum": 0},
        "rmse": {"type": "number", "minimum": 0},
        "mis": _NULLABLE_NUMBER,
        "width": _NULLABLE_NUMBER,
        "coverage": _FRACTION,
        "crossing_rate": _FRACTION,
        "count": {"type": "integer", "minimum": 1},
    },
}

RECORD_SCHEMA = {
    "type": "object",
    "required": [
        "run_id", "method", "seed", "rho", "sample_count", "config",
        "horizons", "windows", "overall", "wall_clock_seconds", "extras",
    ],
    "properties": {
        "run_id": {"type": "string"},
        "method": {"type": "string", "enum": [tag.value for tag in MethodTag]},
        "seed": {"type": "integer"},
        "rho": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "sample_count": {"type": ["integer", "null"], "minimum": 1},
        "config": {"type": "object"},
        "horizons": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["horizon", "metrics"],
                "properties": {"horizon": {"type": "integer", "minimum": 1}, "metrics": METRIC_SCHEMA},
            },
        },
        "windows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["steps", "metrics"],
                "properties": {"steps": {"type": "integer", "minimum": 1}, "metrics": METRIC_SCHEMA},
            },
        },
        "overall": METRIC_SCHEMA,
        "wall_clock_seconds": {"type": "number", "minimum": 0},
        "extras": {"type": "object"},
    },
}

_TYPES = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
    "null": lambda v: v is None,
}


def _check(value: Any, schema: dict, where: str) -> None:
    allowed = schema.get("type")
    if allowed is not None:
        allowed = [allowed] if isinstance(allowed, str) else allowed
        if not any(_TYPES[t](value) for t in allowed):
            raise ValidationError(f"{where}: expected {' or '.join(allowed)}, got {value!r}")
    if value is None:
        return
    if "enum" in schema and value not in schema["enum"]:
        raise ValidationError(f"{where}: {value!r} is not one of {schema['enum']}")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if "minimum" in schema and value < schema["minimum"]:
            raise ValidationError(f"{where}: {value} is below {schema['minimum']}")
        if "maximum" in schema and value > schema["maximum"]:
            raise ValidationError(f"{where}: {value} is above {schema['maximum']}")
        if "exclusiveMinimum" in schema and value <= schema["exclusiveMinimum"]:
            raise ValidationError(f"{where}: {value} must exceed {schema['exclusiveMinimum']}")
        if "exclusiveMaximum" in schema and value >= schema["exclusiveMaximum"]:
            raise ValidationError(f"{where}: {value} must stay below {schema['exclusiveMaximum']}")
    if isinstance(value, dict):
        for key in schema.get("required", ()):
            if key not in value:
                raise ValidationError(f"{where}: missing field {key}")
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                _check(value[key], sub, f"{where}.{key}")
    if isinstance(value, list):
        if len(value) < schema.get("minItems", 0):
            raise ValidationError(f"{where}: needs at least {schema['minItems']} items")
        for i, item in enumerate(value):
            _check(item, schema.get("items", {}), f"{where}[{i}]")


def validate_record(data: dict) -> None:
    """Raise ValidationError unless ``data`` matches RECORD_SCHEMA."""
    _check(data, RECORD_SCHEMA, "record")


def make_run_id(method: str, seed: int, config: dict) -> str:
    """Stable id from the method, seed and configuration echo."""
    digest = hashlib.blake2b(json.dumps(config, sort_keys=True).encode(), digest_size=5).hexdigest()
    return f"{method}-s{seed}-{digest}"


@dataclass
class ResultsRecord:
    """Metrics of one experiment run, per horizon step and per cumulative window."""
    run_id: str
    method: str
    seed: int
    rho: float
    config: dict[str, Any]
    horizons: list[tuple[int, MetricBundle]]
    windows: list[tuple[int, MetricBundle]]
    overall: MetricBundle
    sample_count: Optional[int] = None
    wall_clock_seconds: float = 0.0
    extras: dict[str, Any] = field(default_factory=dict)

    def metrics(self, horizon: int) -> MetricBundle:
        for step, bundle in self.horizons:
            if step == horizon:
                return bundle
        raise ValidationError(f"Record {self.run_id} has no horizon {horizon}")

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "method": self.method,
            "seed": self.seed,
            "rho": self.rho,
            "sample_count": self.sample_count,
            "config": self.config,
            "horizons": [{"horizon": h, "metrics": asdict(b)} for h, b in self.horizons],
            "windows": [{"steps": k, "metrics": asdict(b)} for k, b in self.windows],
            "overall": asdict(self.overall),
            "wall_clock_seconds": self.wall_clock_seconds,
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResultsRecord":
        validate_record(data)
        return cls(
            run_id=data["run_id"],
            method=data["method"],
            seed=data["seed"],
            rho=data["rho"],
            config=data["config"],
            horizons=[(h["horizon"], MetricBundle.from_dict(h["metrics"])) for h in data["horizons"]],
            windows=[(w["steps"], MetricBundle.from_dict(w["metrics"])) for w in data["windows"]],
            overall=MetricBundle.from_dict(data["overall"]),
            sample_count=data["sample_count"],
            wall_clock_seconds=data["wall_clock_seconds"],
            extras=data["extras"],
        )

    def comparable(self) -> dict:
        """The record without wall-clock time, for determinism checks."""
        data = self.to_dict()
        data.pop("wall_clock_seconds")
        return data


class ResultsStore:
    """Writes records under ``root/<run_id>/`` and optionally mirrors them to MongoDB."""

    def __init__(
        self,
        root: PathLike,
        mongodb_uri: Optional[str] = None,
        database_name: str = "stuq",
        collection: Optional[Collection] = None,
    ):
        self.root = Path(root)
        self._collection = collection
        if collection is None and mongodb_uri:
            try:
                client: MongoClient = MongoClient(mongodb_uri, serverSelectionTimeoutMS=5000)
                self._collection = client[database_name]["results"]
                self._collection.create_index("run_id", unique=True, name="run_id_unique")
                logger.info(f"ResultsStore: MongoDB mirror enabled ({database_name}.results)")
            except Exception as e:
                logger.warning(f"ResultsStore: MongoDB init failed, writing to disk only: {e}")
                self._collection = None

    @classmethod
    def from_env(cls, root: PathLike) -> "ResultsStore":
        return cls(
            root,
            mongodb_uri=os.getenv("RESULTS_MONGODB_URI"),
            database_name=os.getenv("RESULTS_MONGODB_DATABASE", "stuq"),
        )

    @property
    def mirrored(self) -> bool:
        return self._collection is not None

    def run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def save(self, record: ResultsRecord) -> Path:
        """Validate, write ``record.json`` atomically, then mirror."""
        data = record.to_dict()
        validate_record(data)
        path = atomic_write_json(self.run_dir(record.run_id) / RECORD_FILE, data)
        logger.info(f"Saved results record {record.run_id} to {path}")
        self._mirror(data)
        return path

    def _mirror(self, data: dict) -> bool:
        if self._collection is None:
            return False
        try:
            self._collection.update_one(
                {"run_id": data["run_id"]},
                {"$set": {**data, "logged_at": datetime.now(timezone.utc)}},
                upsert=True,
            )
            logger.debug(f"Mirrored record {data['run_id']} to MongoDB")
            return True
        except Exception as e:
            logger.warning(f"Failed to mirror record {data['run_id']}: {e}")
            return False

    def load(self, source: Union[str, PathLike]) -> ResultsRecord:
        """Load by run id, run directory or record file path."""
        path = Path(source)
        return read_record(path if path.exists() else self.run_dir(str(source)))

    def list_records(self) -> list[ResultsRecord]:
        return [self.load(p) for p in sorted(self.root.glob(f"*/{RECORD_FILE}"))]


def read_record(path: PathLike) -> ResultsRecord:
    """Read a record from its run directory or its ``record.json``."""
    path = Path(path)
    if path.is_dir():
        path = path / RECORD_FILE
    if not path.is_file():
        raise ValidationError(f"No results record at {path}")
    return ResultsRecord.from_dict(json.loads(path.read_text()))
