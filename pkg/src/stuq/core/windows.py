"""Windowed training data shared by methods and the harness."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ShapeError, ValidationError


@dataclass
class WindowSet:
    """(history, target) windows in normalized units.

    inputs: (N, T_in, P, D); targets and mask: (N, H, P, D). Masked target
    entries are filled with 0 and must carry weight 0 in every loss.
    ``window_weights`` optionally rescales each window's contribution.
    """
    inputs: np.ndarray
    targets: np.ndarray
    mask: np.ndarray
    window_weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.inputs.ndim != 4 or self.targets.ndim != 4:
            raise ShapeError(
                f"Windows must be 4-D, got inputs {self.inputs.shape} and targets {self.targets.shape}"
            )
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ShapeError(f"{self.inputs.shape[0]} inputs but {self.targets.shape[0]} targets")
        if self.inputs.shape[2:] != self.targets.shape[2:]:
            raise ShapeError(f"Input frames {self.inputs.shape[2:]} differ from target frames {self.targets.shape[2:]}")
        if self.mask.shape != self.targets.shape:
            raise ShapeError(f"Mask shape {self.mask.shape} does not match targets {self.targets.shape}")
        if self.window_weights is not None:
            self.window_weights = np.asarray(self.window_weights, dtype=np.float64)
            if self.window_weights.shape != (len(self),):
                raise ShapeError(f"window_weights must have shape ({len(self)},)")
            if np.any(self.window_weights < 0):
                raise ValidationError("window_weights must be nonnegative")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def history_length(self) -> int:
        return self.inputs.shape[1]

    @property
    def horizon(self) -> int:
        return self.targets.shape[1]

    @property
    def nodes(self) -> int:
        return self.inputs.shape[2]

    @property
    def features(self) -> int:
        return self.inputs.shape[3]

    def subset(self, indices: np.ndarray) -> "WindowSet":
        indices = np.asarray(indices, dtype=np.int64)
        weights = None if self.window_weights is None else self.window_weights[indices]
        return WindowSet(self.inputs[indices], self.targets[indices], self.mask[indices], weights)

    def reweighted(self, weights: np.ndarray) -> "WindowSet":
        return WindowSet(self.inputs, self.targets, self.mask, weights)


@dataclass
class TrainingData:
    """Train and validation windows."""
    train: WindowSet
    validation: WindowSet

    def __post_init__(self):
        if len(self.train) == 0:
            raise ValidationError("Training split has no windows")
