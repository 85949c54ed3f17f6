"""Single-hidden-layer feed-forward network baseline.

Hidden units apply tanh to a weighted sum plus bias; the output unit is
linear. Like the fuzzy models, inputs are standardized and the target is
min-max normalized internally, so raw units go in and come out.
"""

import copy
import json
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import ConfigError, DivergenceError, InputError, ParameterError
from .pipeline import MinMaxSpec, ZScoreSpec, metric_bundle, rmse
from .training import TrainConfig, TrainReport

MLP_FORMAT_VERSION = "mlp-1"
_DIVERGENCE_FACTOR = 1e6


@dataclass
class MlpModel:
    attribute_names: list[str]
    w1: np.ndarray            # (n_hidden, n_inputs)
    b1: np.ndarray            # (n_hidden,)
    w2: np.ndarray            # (n_hidden,)
    b2: float
    input_norm: ZScoreSpec
    target_norm: MinMaxSpec
    activation: str = "tanh"

    def __post_init__(self):
        self.w1 = np.asarray(self.w1, dtype=float)
        self.b1 = np.asarray(self.b1, dtype=float)
        self.w2 = np.asarray(self.w2, dtype=float)
        self.b2 = float(self.b2)
        self.validate()

    @property
    def n_inputs(self) -> int:
        return len(self.attribute_names)

    @property
    def n_hidden(self) -> int:
        return self.w1.shape[0]

    def validate(self):
        m = self.n_inputs
        if m == 0:
            raise ParameterError("network needs at least one input")
        if self.activation != "tanh":
            raise ParameterError(f"unsupported activation {self.activation!r}")
        h = self.w1.shape[0] if self.w1.ndim == 2 else -1
        if self.w1.shape != (h, m) or h < 1:
            raise ParameterError(f"hidden weights must be (n_hidden, {m})")
        if self.b1.shape != (h,) or self.w2.shape != (h,):
            raise ParameterError("bias/output weight shapes disagree with hidden size")
        for arr in (self.w1, self.b1, self.w2):
            if not np.all(np.isfinite(arr)):
                raise ParameterError("network parameters must be finite")
        if not np.isfinite(self.b2):
            raise ParameterError("network parameters must be finite")

    def clone(self) -> "MlpModel":
        return copy.deepcopy(self)


def mlp_init(train: Dataset, n_hidden: int = 10, seed: int = 0) -> MlpModel:
    """Fresh network with uniform [-0.5, 0.5] weights from the seed and
    normalization specs fitted on the given training set.

    Draw order is input-stable: biases and output weights first, then one
    hidden-weight column per input. Two networks built from the same seed
    whose feature sets share a prefix therefore share every parameter
    except the columns for the extra inputs, so a fixed-seed comparison
    between feature sets differs only through the added features' own
    pathways.
    """
    if n_hidden < 1:
        raise ParameterError("n_hidden must be at least 1")
    rng = np.random.default_rng(seed)
    m = train.n_inputs
    b1 = rng.uniform(-0.5, 0.5, size=n_hidden)
    w2 = rng.uniform(-0.5, 0.5, size=n_hidden)
    b2 = float(rng.uniform(-0.5, 0.5))
    w1 = np.column_stack([rng.uniform(-0.5, 0.5, size=n_hidden) for _ in range(m)])
    return MlpModel(
        attribute_names=list(train.attribute_names),
        w1=w1,
        b1=b1,
        w2=w2,
        b2=b2,
        input_norm=ZScoreSpec.fit(train.x),
        target_norm=MinMaxSpec.fit(train.y),
    )


def _check_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.n_inputs:
        raise InputError(f"expected (n, {model.n_inputs}) inputs, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("inputs contain non-finite values")
    return x


def _forward_norm(model: MlpModel, x: np.ndarray):
    x_norm = model.input_norm.apply(x)
    hidden = np.tanh(x_norm @ model.w1.T + model.b1)
    y_norm = hidden @ model.w2 + model.b2
    return x_norm, hidden, y_norm


def mlp_infer(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Raw-unit predictions for a batch of raw-unit input rows."""
    x = _check_batch(model, x)
    _, _, y_norm = _forward_norm(model, x)
    return model.target_norm.invert(y_norm)


def mlp_gradient(model: MlpModel, x: np.ndarray, t_norm: np.ndarray):
    """Batch gradient of the squared-error sum in normalized units.

    Returns (grads dict with keys w1, b1, w2, b2, and sse).
    """
    x = _check_batch(model, x)
    x_norm, hidden, y_norm = _forward_norm(model, x)
    err = y_norm - np.asarray(t_norm, dtype=float)
    d_pre = (2.0 * err)[:, None] * model.w2[None, :] * (1.0 - hidden**2)
    grads = {
        "w1": d_pre.T @ x_norm,
        "b1": d_pre.sum(axis=0),
        "w2": 2.0 * (hidden.T @ err),
        "b2": 2.0 * float(err.sum()),
    }
    return grads, float(np.sum(err * err))


def mlp_train(
    train_set: Dataset,
    test_set: Dataset,
    n_hidden: int = 10,
    config: TrainConfig | None = None,
) -> tuple[MlpModel, TrainReport]:
    """Batch gradient descent with the same adaptive step size and
    best-on-test snapshot rule as the fuzzy trainer.

    Each step applies the mean-per-sample gradient so the learning rate
    keeps the same meaning regardless of dataset size. Zero epochs returns
    the freshly initialized network. Training aborts if the error sum
    blows up past 1e6 times its initial value.
    """
    if config is None:
        config = TrainConfig()
    model = mlp_init(train_set, n_hidden=n_hidden, seed=config.seed)
    t_norm = model.target_norm.apply(train_set.y)
    scale = 1.0 / train_set.n_samples
    report = TrainReport()
    best = model.clone()
    lr = config.learning_rate
    prev_sse = None
    initial_sse = None
    drops = 0

    for epoch in range(1, config.epochs + 1):
        tr = rmse(mlp_infer(model, train_set.x), train_set.y)
        te = rmse(mlp_infer(model, test_set.x), test_set.y)
        if not (np.isfinite(tr) and np.isfinite(te)):
            raise DivergenceError(f"non-finite error at epoch {epoch}")
        report.train_rmse.append(tr)
        report.test_rmse.append(te)
        report.lr.append(lr)
        if te < report.best_test_rmse:
            report.best_test_rmse = te
            report.best_epoch = epoch
            best = model.clone()
        if config.patience is not None and epoch - report.best_epoch >= config.patience:
            break

        grads, sse = mlp_gradient(model, train_set.x, t_norm)
        report.sse.append(sse)
        if initial_sse is None:
            initial_sse = sse if sse > 0 else 1.0
        if sse > _DIVERGENCE_FACTOR * initial_sse:
            raise DivergenceError(
                f"error sum grew {sse / initial_sse:.3g}x past its initial value; "
                "lower the learning rate"
            )
        if prev_sse is not None:
            if sse > prev_sse:
                lr *= config.lr_decrease
                drops = 0
            elif sse < prev_sse:
                drops += 1
                if drops >= 2:
                    lr *= config.lr_increase
                    drops = 0
        prev_sse = sse
        if epoch < config.epochs:
            step = lr * scale
            model.w1 -= step * grads["w1"]
            model.b1 -= step * grads["b1"]
            model.w2 -= step * grads["w2"]
            model.b2 -= step * grads["b2"]

    report.train_metrics = metric_bundle(mlp_infer(best, train_set.x), train_set.y)
    report.test_metrics = metric_bundle(mlp_infer(best, test_set.x), test_set.y)
    return best, report


def mlp_to_dict(model: MlpModel) -> dict:
    return {
        "version": MLP_FORMAT_VERSION,
        "n_inputs": model.n_inputs,
        "n_hidden": model.n_hidden,
        "attribute_names": list(model.attribute_names),
        "activation": model.activation,
        "w1": model.w1.tolist(),
        "b1": model.b1.tolist(),
        "w2": model.w2.tolist(),
        "b2": model.b2,
        "input_norm": model.input_norm.to_dict(),
        "target_norm": model.target_norm.to_dict(),
    }


def mlp_from_dict(d: dict) -> MlpModel:
    try:
        version = d["version"]
        if version != MLP_FORMAT_VERSION:
            raise ConfigError(f"unsupported network format version {version!r}")
        model = MlpModel(
            attribute_names=list(d["attribute_names"]),
            w1=np.asarray(d["w1"]),
            b1=np.asarray(d["b1"]),
            w2=np.asarray(d["w2"]),
            b2=d["b2"],
            input_norm=ZScoreSpec.from_dict(d["input_norm"]),
            target_norm=MinMaxSpec.from_dict(d["target_norm"]),
            activation=d.get("activation", "tanh"),
        )
    except (KeyError, TypeError, ParameterError) as exc:
        raise InputError(f"malformed network document: {exc}") from exc
    if d["n_inputs"] != model.n_inputs or d["n_hidden"] != model.n_hidden:
        raise InputError("network document dimensions disagree with parameter arrays")
    return model


def save_mlp(model: MlpModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mlp_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_mlp(path) -> MlpModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: network document must be a JSON object")
    return mlp_from_dict(doc)
