"""Hybrid estimation for rule systems: exact least squares for the
consequent coefficients each epoch, then one batch gradient step on the
bell parameters, with an adaptive step size and a best-on-test snapshot.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DivergenceError, ParameterError
from .fis import (
    TskModel,
    bell_grad,
    forward,
    infer_batch,
    refresh_outputs,
    rule_design_matrix,
)
from .pipeline import metric_bundle, rmse

_COND_LIMIT = 1e12
_RIDGE_SCALE = 1e-8
_WIDTH_FLOOR_SCALE = 1e-6


@dataclass
class TrainConfig:
    """Knobs shared by the fuzzy and network trainers.

    The step size halves when the training error rises and grows by
    lr_increase after two consecutive drops. `patience` (epochs without a
    new best test RMSE) optionally stops training early.
    """

    epochs: int = 50
    learning_rate: float = 0.01
    lr_increase: float = 1.1
    lr_decrease: float = 0.5
    b_min: float = 0.1
    b_max: float = 10.0
    seed: int = 0
    split_fraction: float = 0.7
    patience: int | None = None
    rule_cap: int = 10000

    def __post_init__(self):
        if self.epochs < 0:
            raise ParameterError("epochs must be non-negative")
        if self.learning_rate < 0:
            raise ParameterError("learning_rate must be non-negative")
        if not self.lr_increase >= 1.0:
            raise ParameterError("lr_increase must be >= 1")
        if not 0.0 < self.lr_decrease <= 1.0:
            raise ParameterError("lr_decrease must be in (0, 1]")
        if not 0.0 < self.b_min <= self.b_max:
            raise ParameterError("need 0 < b_min <= b_max")
        if not 0.0 < self.split_fraction < 1.0:
            raise ParameterError("split_fraction must be in (0, 1)")
        if self.patience is not None and self.patience < 1:
            raise ParameterError("patience must be at least 1")
        if self.rule_cap < 1:
            raise ParameterError("rule_cap must be at least 1")


@dataclass
class TrainReport:
    """Per-epoch learning curves plus snapshot bookkeeping and the final
    metric bundles of the returned (best) model."""

    train_rmse: list = field(default_factory=list)
    test_rmse: list = field(default_factory=list)
    sse: list = field(default_factory=list)
    lr: list = field(default_factory=list)
    best_epoch: int = 0
    best_test_rmse: float = float("inf")
    n_grad_skipped: int = 0
    train_metrics: dict = field(default_factory=dict)
    test_metrics: dict = field(default_factory=dict)

    @property
    def epochs_run(self) -> int:
        return len(self.train_rmse)


def lse_consequents(model: TskModel, train: Dataset):
    """Solve all rule consequents at once by linear least squares.

    Targets are taken in normalized units. A rank-deficient or badly
    conditioned system (or one with fewer rows than unknowns) falls back
    to a lightly ridged normal-equation solve. Updates the model in
    place; returns (forward dict, info dict). The forward dict's output
    stages are stale until refresh_outputs is applied.
    """
    a, fwd = rule_design_matrix(model, train.x)
    t = model.target_norm.apply(train.y)
    n_rows, n_unknowns = a.shape
    if n_rows < n_unknowns:
        warnings.warn(
            f"{n_rows} samples for {n_unknowns} consequent coefficients; "
            "solution is underdetermined",
            RuntimeWarning,
            stacklevel=2,
        )
    sol, _, rank, sv = np.linalg.lstsq(a, t, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else float("inf")
    ridged = rank < n_unknowns or cond > _COND_LIMIT
    if ridged:
        gram = a.T @ a
        lam = _RIDGE_SCALE * float(np.trace(gram)) / n_unknowns
        if lam <= 0.0:
            lam = _RIDGE_SCALE
        sol = np.linalg.solve(gram + lam * np.eye(n_unknowns), a.T @ t)
    model.set_consequents(sol.reshape(model.n_rules, model.n_inputs + 1))
    return fwd, {"rank": int(rank), "cond": cond, "ridged": ridged}


def premise_gradient(model: TskModel, x: np.ndarray, t_norm: np.ndarray, fwd: dict | None = None):
    """Batch gradient of the squared-error sum (normalized units) with
    respect to every bell parameter.

    Returns (grads, sse): grads is one (bank size, 3) array per input with
    columns d/da, d/db, d/dc. Rows whose firing underflowed contribute
    nothing.
    """
    if fwd is None:
        fwd = forward(model, x)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    m = model.n_inputs
    n_rules = model.n_rules
    ant = model.antecedent_matrix()
    mu = fwd["memberships"]

    picked = np.stack([mu[i][:, ant[:, i]] for i in range(m)], axis=2)
    left = np.ones_like(picked)
    left[:, :, 1:] = np.cumprod(picked[:, :, :-1], axis=2)
    rev = np.cumprod(picked[:, :, ::-1], axis=2)[:, :, ::-1]
    right = np.ones_like(picked)
    right[:, :, :-1] = rev[:, :, 1:]
    excl = left * right

    err = fwd["y_norm"] - np.asarray(t_norm, dtype=float)
    live = ~fwd["degenerate"]
    w_sum = fwd["firing"].sum(axis=1)
    coef = np.zeros((x.shape[0], n_rules))
    coef[live] = (
        2.0
        * err[live, None]
        * (fwd["rule_outputs"][live] - fwd["y_norm"][live, None])
        / w_sum[live, None]
    )

    grads = []
    for i, bank in enumerate(model.mf_banks):
        onehot = np.zeros((n_rules, len(bank)))
        onehot[np.arange(n_rules), ant[:, i]] = 1.0
        dmu = (coef * excl[:, :, i]) @ onehot
        g = np.empty((len(bank), 3))
        for j, mf in enumerate(bank):
            _, da, db, dc = bell_grad(mf, x[:, i])
            g[j, 0] = np.dot(dmu[:, j], da)
            g[j, 1] = np.dot(dmu[:, j], db)
            g[j, 2] = np.dot(dmu[:, j], dc)
        grads.append(g)
    sse = float(np.sum(err * err))
    return grads, sse


def width_floors(train: Dataset) -> np.ndarray:
    """Minimum allowed bell width per input, relative to the data span."""
    spans = train.x.max(axis=0) - train.x.min(axis=0)
    return _WIDTH_FLOOR_SCALE * np.maximum(spans, 1.0)


def apply_premise_gradients(
    model: TskModel, grads, lr: float, floors: np.ndarray, b_min: float, b_max: float
) -> int:
    """One gradient-descent update of every bell, in place.

    Non-finite gradient entries are skipped (and counted); widths and
    slopes are clamped back into their legal ranges afterwards.
    """
    skipped = 0
    for i, bank in enumerate(model.mf_banks):
        for j, mf in enumerate(bank):
            da, db, dc = grads[i][j]
            if np.isfinite(da):
                mf.a -= lr * da
            else:
                skipped += 1
            if np.isfinite(db):
                mf.b -= lr * db
            else:
                skipped += 1
            if np.isfinite(dc):
                mf.c -= lr * dc
            else:
                skipped += 1
            mf.a = max(mf.a, float(floors[i]))
            mf.b = min(max(mf.b, b_min), b_max)
    return skipped


def premise_step(
    model: TskModel,
    train_set: Dataset,
    lr: float,
    b_min: float = 0.1,
    b_max: float = 10.0,
) -> int:
    """Compute the batch premise gradient on train_set and apply one step.

    The applied step uses the mean-per-sample gradient so the learning
    rate keeps the same meaning regardless of dataset size. Consequents
    are left untouched. Returns the count of skipped (non-finite)
    parameter updates.
    """
    t_norm = model.target_norm.apply(train_set.y)
    grads, _ = premise_gradient(model, train_set.x, t_norm)
    return apply_premise_gradients(
        model, grads, lr / train_set.n_samples, width_floors(train_set), b_min, b_max
    )


def train(
    model: TskModel, train_set: Dataset, test_set: Dataset, config: TrainConfig | None = None
) -> tuple[TskModel, TrainReport]:
    """Alternate exact consequent solves with premise gradient steps.

    Each epoch: solve consequents, record raw-unit train/test RMSE, keep
    the best-on-test model seen so far, then (except after the last
    solve) take one premise step with the mean-per-sample gradient.
    Returns (best snapshot, report); the passed-in model is trained in
    place.
    """
    if config is None:
        config = TrainConfig()
    if config.epochs < 1:
        raise ParameterError("training needs at least one epoch")
    if train_set.n_inputs != model.n_inputs or test_set.n_inputs != model.n_inputs:
        raise ParameterError("dataset arity does not match the model")

    floors = width_floors(train_set)
    t_norm = model.target_norm.apply(train_set.y)
    report = TrainReport()
    best = model.clone()
    lr = config.learning_rate
    prev_sse = None
    drops = 0

    for epoch in range(1, config.epochs + 1):
        fwd, _ = lse_consequents(model, train_set)
        refresh_outputs(model, fwd)
        tr = rmse(fwd["y"], train_set.y)
        te = rmse(infer_batch(model, test_set.x), test_set.y)
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

        grads, sse = premise_gradient(model, train_set.x, t_norm, fwd)
        report.sse.append(sse)
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
            report.n_grad_skipped += apply_premise_gradients(
                model, grads, lr / train_set.n_samples, floors, config.b_min, config.b_max
            )

    report.train_metrics = metric_bundle(infer_batch(best, train_set.x), train_set.y)
    report.test_metrics = metric_bundle(infer_batch(best, test_set.x), test_set.y)
    return best, report
