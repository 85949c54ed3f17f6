"""Sequential forward selection of predictor attributes.

Each stage trains one small network per remaining candidate added to the
current set and keeps the augmentation with the best held-out
correlation; selection stops when no augmentation improves on the
current score.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import ParameterError, UndefinedMetricError
from .mlp import mlp_infer, mlp_train
from .pipeline import cc, random_split
from .training import TrainConfig


@dataclass
class SfsStage:
    stage: int
    attribute: str
    cc: float


@dataclass
class SfsResult:
    selected: list[str]
    trace: list[SfsStage] = field(default_factory=list)


def _score(ds: Dataset, names: list[str], config: TrainConfig, n_hidden: int) -> float:
    subset = ds.select_attributes(names)
    train_set, test_set = random_split(subset, config.split_fraction, config.seed)
    best, _ = mlp_train(train_set, test_set, n_hidden=n_hidden, config=config)
    try:
        return cc(mlp_infer(best, test_set.x), test_set.y)
    except UndefinedMetricError:
        return float("-inf")


def sfs(
    dataset: Dataset,
    n_hidden: int = 10,
    epochs: int = 100,
    learning_rate: float = 0.01,
    seed: int = 0,
    split_fraction: float = 0.7,
) -> SfsResult:
    """Greedy forward pass over the dataset's attribute columns.

    Every evaluation at a given stage uses the same split and network
    seed, so candidates differ only by feature set. The returned trace
    has one entry per accepted stage; its CC values are non-decreasing.
    """
    if dataset.n_inputs < 1:
        raise ParameterError("need at least one candidate attribute")
    config = TrainConfig(
        epochs=epochs,
        learning_rate=learning_rate,
        seed=seed,
        split_fraction=split_fraction,
    )
    remaining = list(dataset.attribute_names)
    selected: list[str] = []
    trace: list[SfsStage] = []
    current_cc = float("-inf")

    stage = 0
    while remaining:
        stage += 1
        scores = [_score(dataset, selected + [name], config, n_hidden) for name in remaining]
        best_idx = int(np.argmax(scores))
        best_cc = scores[best_idx]
        if stage == 1:
            if not best_cc > 0.0:
                warnings.warn(
                    "no single attribute scores a positive held-out correlation; "
                    "keeping the least bad one",
                    RuntimeWarning,
                    stacklevel=2,
                )
        elif not best_cc > current_cc:
            break
        name = remaining.pop(best_idx)
        selected.append(name)
        trace.append(SfsStage(stage=stage, attribute=name, cc=float(best_cc)))
        current_cc = best_cc
    return SfsResult(selected=selected, trace=trace)
