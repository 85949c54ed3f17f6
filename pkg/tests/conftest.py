"""Shared helpers: random model and dataset factories used across tests."""

import numpy as np
import pytest

from sandfrac.data import Dataset
from sandfrac.fis import BellMf, TskModel, TskRule
from sandfrac.pipeline import MinMaxSpec, ZScoreSpec


def make_dataset(rng, n=40, m=2, names=None, fn=None):
    """Random dataset with x in roughly [-2, 2] and y in (0, 1)."""
    if names is None:
        names = [f"attr{i + 1}" for i in range(m)]
    x = rng.uniform(-2.0, 2.0, size=(n, m))
    if fn is None:
        y = 1.0 / (1.0 + np.exp(-x.sum(axis=1)))
    else:
        y = fn(x)
    return Dataset(attribute_names=list(names), x=x, y=y)


def make_model(rng, n_inputs=2, mfs_per_input=2, n_rules=None, wide=True):
    """Random bell-MF model with rules drawn from the full cross product.

    Wide MFs keep firing strengths comfortably nonzero for x in [-2, 2].
    """
    names = [f"attr{i + 1}" for i in range(n_inputs)]
    banks = []
    for _ in range(n_inputs):
        bank = []
        for j in range(mfs_per_input):
            a = rng.uniform(1.0, 3.0) if wide else rng.uniform(0.05, 0.3)
            bank.append(
                BellMf(
                    a=a,
                    b=rng.uniform(1.5, 4.0),
                    c=rng.uniform(-1.5, 1.5),
                    label=f"mf{j + 1}",
                )
            )
        banks.append(bank)
    combos = np.indices((mfs_per_input,) * n_inputs).reshape(n_inputs, -1).T
    if n_rules is not None:
        pick = rng.choice(len(combos), size=min(n_rules, len(combos)), replace=False)
        combos = combos[pick]
    rules = [
        TskRule(antecedent=tuple(row), consequent=rng.normal(0.0, 1.0, size=n_inputs + 1))
        for row in combos
    ]
    input_norm = ZScoreSpec(
        mean=rng.uniform(-0.5, 0.5, size=n_inputs),
        std=rng.uniform(0.5, 2.0, size=n_inputs),
    )
    target_norm = MinMaxSpec(low=0.0, high=1.0)
    return TskModel(
        attribute_names=names,
        mf_banks=banks,
        rules=rules,
        input_norm=input_norm,
        target_norm=target_norm,
    )


def bell_direct(a, b, c, x):
    """Independent textbook evaluation of the bell membership."""
    return 1.0 / (1.0 + np.abs((x - c) / a) ** (2.0 * b))


def norm_output_direct(model, x):
    """Independent normalized-space TSK output via explicit loops."""
    x = np.asarray(x, dtype=float)
    x_norm = (x - model.input_norm.mean) / model.input_norm.std
    w = []
    for rule in model.rules:
        prod = 1.0
        for i, mf_idx in enumerate(rule.antecedent):
            mf = model.mf_banks[i][mf_idx]
            prod *= bell_direct(mf.a, mf.b, mf.c, x[i])
        w.append(prod)
    w = np.array(w)
    wbar = w / w.sum()
    f = np.array([rule.consequent[:-1] @ x_norm + rule.consequent[-1] for rule in model.rules])
    return float(wbar @ f)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
