import numpy as np
import pytest

from stuq.core.enums import CellKind, HeadKind
from stuq.core.windows import TrainingData, WindowSet
from stuq.methods.training import TrainConfig
from stuq.models.base import ModelConfig
from stuq.spatial.graph import SpatialGraph

NODES = 3
HISTORY = 3
HORIZON = 2


def make_windows(count, seed=0):
    rng = np.random.default_rng(seed)
    inputs = rng.normal(size=(count, HISTORY, NODES, 1))
    targets = np.repeat(inputs[:, -1:], HORIZON, axis=1) * 0.8 + 0.1 * rng.normal(size=(count, HORIZON, NODES, 1))
    return WindowSet(inputs, targets, np.ones_like(targets, dtype=bool))


@pytest.fixture
def tiny_data():
    return TrainingData(make_windows(16, seed=0), make_windows(4, seed=1))


@pytest.fixture
def test_inputs():
    return make_windows(5, seed=2).inputs


@pytest.fixture
def triangle():
    return SpatialGraph(np.ones((NODES, NODES)) - np.eye(NODES))


@pytest.fixture
def quick_train():
    return TrainConfig(epochs=3, patience=3, batch_size=8)


def model_config(head=HeadKind.POINT, **kwargs):
    return ModelConfig(
        cell_kind=CellKind.GRAPH_CONV, nodes=NODES, features=1, hidden_units=4,
        horizon=HORIZON, head_kind=head, **kwargs,
    )
