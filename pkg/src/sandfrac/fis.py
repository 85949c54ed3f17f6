"""Takagi-Sugeno fuzzy inference: bell membership functions, rule firing,
and the five-stage forward pass (membership, firing, normalization,
per-rule linear output, weighted sum).

Membership functions are evaluated on raw input units. Rule consequents
act on standardized inputs, and the weighted-sum output lives in
normalized target units; `infer` undoes both so callers only ever see
raw units.
"""

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateFiringError, InputError, ParameterError
from .pipeline import MinMaxSpec, ZScoreSpec

MODEL_FORMAT_VERSION = "tsk-1"


@dataclass
class BellMf:
    """Generalized bell curve 1 / (1 + |(x - c) / a|^(2b)).

    `c` is the center (membership 1), `a` the half-width at membership 0.5,
    and `b` controls shoulder steepness. Parameters are in raw input units.
    """

    a: float
    b: float
    c: float
    label: str = ""

    def __post_init__(self):
        self.a = float(self.a)
        self.b = float(self.b)
        self.c = float(self.c)
        if not (np.isfinite(self.a) and np.isfinite(self.b) and np.isfinite(self.c)):
            raise ParameterError("bell parameters must be finite")
        if self.a <= 0:
            raise ParameterError(f"bell width a must be positive, got {self.a}")
        if self.b <= 0:
            raise ParameterError(f"bell slope b must be positive, got {self.b}")


def bell_log_eval(mf: BellMf, x) -> np.ndarray:
    """log of the bell membership, exact at the center and safe in the tails."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        log_u = np.log(np.abs((x - mf.c) / mf.a))
    return -np.logaddexp(0.0, 2.0 * mf.b * log_u)


def bell_eval(mf: BellMf, x) -> np.ndarray:
    """Bell membership value in [0, 1]."""
    return np.exp(bell_log_eval(mf, x))


def bell_grad(mf: BellMf, x):
    """Return (f, df/da, df/db, df/dc) elementwise.

    Uses g = f * (1 - f), which vanishes at the center, so the otherwise
    singular b and c terms are finite there.
    """
    x = np.asarray(x, dtype=float)
    f = bell_eval(mf, x)
    g = f * (1.0 - f)
    d = x - mf.c
    at_center = d == 0.0
    with np.errstate(divide="ignore"):
        log_u = np.log(np.abs(np.where(at_center, 1.0, d) / mf.a))
    df_da = 2.0 * mf.b * g / mf.a
    df_db = np.where(at_center, 0.0, -2.0 * g * log_u)
    safe_d = np.where(at_center, 1.0, d)
    df_dc = np.where(at_center, 0.0, 2.0 * mf.b * g / safe_d)
    return f, df_da, df_db, df_dc


@dataclass
class TskRule:
    """One rule: an MF index per input plus first-order consequent weights.

    `consequent` has one coefficient per standardized input followed by a
    constant term, all in normalized target units.
    """

    antecedent: tuple
    consequent: np.ndarray

    def __post_init__(self):
        self.antecedent = tuple(int(i) for i in self.antecedent)
        self.consequent = np.asarray(self.consequent, dtype=float)
        if self.consequent.ndim != 1:
            raise ParameterError("rule consequent must be a 1-D coefficient vector")


@dataclass
class TskModel:
    """A first-order fuzzy rule system with its fitted normalizations."""

    attribute_names: list[str]
    mf_banks: list[list[BellMf]]
    rules: list[TskRule]
    input_norm: ZScoreSpec
    target_norm: MinMaxSpec

    def __post_init__(self):
        self.validate()

    @property
    def n_inputs(self) -> int:
        return len(self.attribute_names)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    def validate(self):
        m = self.n_inputs
        if m == 0:
            raise ParameterError("model needs at least one input")
        if len(self.mf_banks) != m:
            raise ParameterError(f"{len(self.mf_banks)} MF banks for {m} inputs")
        for i, bank in enumerate(self.mf_banks):
            if not bank:
                raise ParameterError(f"input {i} has an empty MF bank")
        if not self.rules:
            raise ParameterError("model needs at least one rule")
        for k, rule in enumerate(self.rules):
            if len(rule.antecedent) != m:
                raise ParameterError(f"rule {k}: antecedent arity {len(rule.antecedent)} != {m}")
            for i, j in enumerate(rule.antecedent):
                if not 0 <= j < len(self.mf_banks[i]):
                    raise ParameterError(f"rule {k}: MF index {j} out of range for input {i}")
            if rule.consequent.shape != (m + 1,):
                raise ParameterError(f"rule {k}: consequent must have {m + 1} coefficients")
        if self.input_norm.mean.shape != (m,):
            raise ParameterError("input normalization arity mismatch")

    def clone(self) -> "TskModel":
        return copy.deepcopy(self)

    def antecedent_matrix(self) -> np.ndarray:
        return np.asarray([r.antecedent for r in self.rules], dtype=int)

    def consequent_matrix(self) -> np.ndarray:
        return np.vstack([r.consequent for r in self.rules])

    def set_consequents(self, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.n_rules, self.n_inputs + 1):
            raise ParameterError(f"consequent matrix must be {(self.n_rules, self.n_inputs + 1)}")
        for rule, row in zip(self.rules, coeffs):
            rule.consequent = row.copy()


def _check_batch(model: TskModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.n_inputs:
        raise InputError(f"expected (n, {model.n_inputs}) inputs, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("inputs contain non-finite values")
    return x


def memberships(model: TskModel, x: np.ndarray) -> list[np.ndarray]:
    """Per-input membership matrices, one (n, bank size) array per input."""
    x = _check_batch(model, x)
    return [
        np.column_stack([bell_eval(mf, x[:, i]) for mf in bank])
        for i, bank in enumerate(model.mf_banks)
    ]


def firing_strengths(model: TskModel, x: np.ndarray) -> np.ndarray:
    """Product-over-inputs rule firing strengths, shape (n, n_rules)."""
    x = _check_batch(model, x)
    mu = memberships(model, x)
    ant = model.antecedent_matrix()
    w = np.ones((x.shape[0], model.n_rules))
    for i in range(model.n_inputs):
        w *= mu[i][:, ant[:, i]]
    return w


def _log_firing_rows(model: TskModel, x_rows: np.ndarray) -> np.ndarray:
    ant = model.antecedent_matrix()
    log_w = np.zeros((x_rows.shape[0], model.n_rules))
    for i, bank in enumerate(model.mf_banks):
        log_mu = np.column_stack([bell_log_eval(mf, x_rows[:, i]) for mf in bank])
        log_w += log_mu[:, ant[:, i]]
    return log_w


def normalize_firing(w: np.ndarray) -> np.ndarray:
    """Scale each row of firing strengths to sum to one.

    Rows that sum to zero cannot be normalized here; callers that want the
    dominant-rule fallback should go through `forward`.
    """
    w = np.asarray(w, dtype=float)
    one_d = w.ndim == 1
    if one_d:
        w = w.reshape(1, -1)
    s = w.sum(axis=1)
    n_dead = int(np.count_nonzero(s == 0.0))
    if n_dead:
        raise DegenerateFiringError(f"{n_dead} sample(s) fire no rule")
    out = w / s[:, None]
    return out[0] if one_d else out


def forward(model: TskModel, x: np.ndarray) -> dict:
    """Full forward pass; returns every stage for training and diagnostics.

    Keys: memberships, firing, norm_firing, degenerate (bool mask of rows
    whose firing underflowed to zero and were replaced by a one-hot on the
    dominant rule), x_norm, rule_outputs, y_norm, y.
    """
    x = _check_batch(model, x)
    n = x.shape[0]
    mu = memberships(model, x)
    ant = model.antecedent_matrix()
    w = np.ones((n, model.n_rules))
    for i in range(model.n_inputs):
        w *= mu[i][:, ant[:, i]]

    s = w.sum(axis=1)
    degenerate = s == 0.0
    w_bar = np.zeros_like(w)
    live = ~degenerate
    w_bar[live] = w[live] / s[live, None]
    if np.any(degenerate):
        log_w = _log_firing_rows(model, x[degenerate])
        w_bar[np.nonzero(degenerate)[0], np.argmax(log_w, axis=1)] = 1.0

    x_norm = model.input_norm.apply(x)
    x_ext = np.column_stack([x_norm, np.ones(n)])
    rule_outputs = x_ext @ model.consequent_matrix().T
    y_norm = np.einsum("nk,nk->n", w_bar, rule_outputs)
    y = model.target_norm.invert(y_norm)
    return {
        "memberships": mu,
        "firing": w,
        "norm_firing": w_bar,
        "degenerate": degenerate,
        "x_norm": x_norm,
        "rule_outputs": rule_outputs,
        "y_norm": y_norm,
        "y": y,
    }


def refresh_outputs(model: TskModel, fwd: dict) -> dict:
    """Recompute the output stages of a forward dict after a consequent
    update; the membership and firing stages are unaffected by it."""
    n = fwd["x_norm"].shape[0]
    x_ext = np.column_stack([fwd["x_norm"], np.ones(n)])
    fwd["rule_outputs"] = x_ext @ model.consequent_matrix().T
    fwd["y_norm"] = np.einsum("nk,nk->n", fwd["norm_firing"], fwd["rule_outputs"])
    fwd["y"] = model.target_norm.invert(fwd["y_norm"])
    return fwd


def infer_batch(model: TskModel, x: np.ndarray, return_flags: bool = False):
    """Predict raw-unit targets for a batch of raw-unit input rows."""
    out = forward(model, x)
    if return_flags:
        flags = {
            "degenerate": out["degenerate"],
            "n_degenerate": int(np.count_nonzero(out["degenerate"])),
        }
        return out["y"], flags
    return out["y"]


def infer(model: TskModel, x) -> float:
    """Predict a single sample given as a length-m vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.n_inputs:
        raise InputError(f"expected a length-{model.n_inputs} sample, got shape {x.shape}")
    return float(infer_batch(model, x.reshape(1, -1))[0])


def fire_rule(model: TskModel, rule: TskRule, x) -> float:
    """Firing strength of one rule: the product of its antecedent
    memberships at the sample x."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.n_inputs:
        raise InputError(f"expected a length-{model.n_inputs} sample, got shape {x.shape}")
    w = 1.0
    for i, j in enumerate(rule.antecedent):
        w *= float(bell_eval(model.mf_banks[i][j], x[i]))
    return w


def design_row(model: TskModel, x) -> np.ndarray:
    """One sample's least-squares row: rule-major blocks of normalized
    firing times the extended standardized input [x_norm, 1]. Its dot
    product with the stacked consequents is the normalized-space output."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.n_inputs:
        raise InputError(f"expected a length-{model.n_inputs} sample, got shape {x.shape}")
    row, _ = rule_design_matrix(model, x.reshape(1, -1))
    return row[0]


def rule_design_matrix(model: TskModel, x: np.ndarray):
    """Least-squares design matrix for the consequent coefficients.

    Row i holds, rule-major, the normalized firing of rule k times each
    extended standardized input [x_norm, 1]. Returns (A, forward dict).
    """
    out = forward(model, x)
    n = out["norm_firing"].shape[0]
    x_ext = np.column_stack([out["x_norm"], np.ones(n)])
    a = (out["norm_firing"][:, :, None] * x_ext[:, None, :]).reshape(n, -1)
    return a, out


def model_to_dict(model: TskModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "n_inputs": model.n_inputs,
        "attribute_names": list(model.attribute_names),
        "mf_banks": [
            [{"label": mf.label, "a": mf.a, "b": mf.b, "c": mf.c} for mf in bank]
            for bank in model.mf_banks
        ],
        "rules": [
            {"antecedent": list(r.antecedent), "consequent": r.consequent.tolist()}
            for r in model.rules
        ],
        "input_norm": model.input_norm.to_dict(),
        "target_norm": model.target_norm.to_dict(),
    }


def model_from_dict(d: dict) -> TskModel:
    try:
        version = d["version"]
        if version != MODEL_FORMAT_VERSION:
            raise ConfigError(f"unsupported model format version {version!r}")
        model = TskModel(
            attribute_names=list(d["attribute_names"]),
            mf_banks=[
                [BellMf(a=e["a"], b=e["b"], c=e["c"], label=e.get("label", "")) for e in bank]
                for bank in d["mf_banks"]
            ],
            rules=[
                TskRule(antecedent=r["antecedent"], consequent=r["consequent"])
                for r in d["rules"]
            ],
            input_norm=ZScoreSpec.from_dict(d["input_norm"]),
            target_norm=MinMaxSpec.from_dict(d["target_norm"]),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed model document: {exc}") from exc
    if d["n_inputs"] != model.n_inputs:
        raise InputError("model document n_inputs disagrees with attribute list")
    return model


def save_model(model: TskModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> TskModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: model document must be a JSON object")
    return model_from_dict(doc)
