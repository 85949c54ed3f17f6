"""Constructors that turn a training set into an initial rule system.

Two families: a grid of evenly spaced sets per input with every
combination as a rule, and cluster-seeded systems where each cluster
found in joint (predictors + target) space becomes one rule.
"""

import numpy as np

from .clustering import ClusterResult, SubtractiveParams, fcm, subtractive
from .data import Dataset
from .errors import ParameterError, RuleExplosionError
from .fis import BellMf, TskModel, TskRule
from .pipeline import MinMaxSpec, ZScoreSpec

RULE_CAP = 10000
_WIDTH_FLOOR_SCALE = 1e-6
_GRID_LABELS = {2: ("low", "high"), 3: ("low", "medium", "high")}


def _grid_labels(p: int) -> list[str]:
    if p in _GRID_LABELS:
        return list(_GRID_LABELS[p])
    return [f"level{i + 1}" for i in range(p)]


def _width_floor(span: float) -> float:
    return _WIDTH_FLOOR_SCALE * max(span, 1.0)


def build_grid(train: Dataset, mfs_per_input=3, b: float = 2.0, rule_cap: int = RULE_CAP) -> TskModel:
    """Grid rule system: evenly spaced bells per input, all combinations.

    Widths are set so adjacent bells cross at membership 0.5. A constant
    input column collapses to a single floor-width set. Consequents start
    at zero; the rule count must stay within rule_cap.
    """
    m = train.n_inputs
    if np.isscalar(mfs_per_input):
        counts = [int(mfs_per_input)] * m
    else:
        counts = [int(p) for p in mfs_per_input]
        if len(counts) != m:
            raise ParameterError(f"{len(counts)} MF counts for {m} inputs")
    if any(p < 2 for p in counts):
        raise ParameterError("each input needs at least two fuzzy sets")

    banks: list[list[BellMf]] = []
    for i, p in enumerate(counts):
        lo = float(train.x[:, i].min())
        hi = float(train.x[:, i].max())
        span = hi - lo
        if span == 0.0:
            banks.append([BellMf(a=_width_floor(span), b=b, c=lo, label="all")])
            continue
        centers = np.linspace(lo, hi, p)
        width = span / (2.0 * (p - 1))
        labels = _grid_labels(p)
        banks.append(
            [BellMf(a=width, b=b, c=float(c), label=lab) for c, lab in zip(centers, labels)]
        )

    n_rules = int(np.prod([len(bank) for bank in banks]))
    if n_rules > rule_cap:
        raise RuleExplosionError(
            f"grid of {n_rules} rules exceeds the cap of {rule_cap}; "
            "reduce sets per input or use a cluster-seeded system"
        )
    grids = np.meshgrid(*[np.arange(len(bank)) for bank in banks], indexing="ij")
    antecedents = np.column_stack([g.ravel() for g in grids])
    rules = [TskRule(antecedent=row, consequent=np.zeros(m + 1)) for row in antecedents]
    return TskModel(
        attribute_names=list(train.attribute_names),
        mf_banks=banks,
        rules=rules,
        input_norm=ZScoreSpec.fit(train.x),
        target_norm=MinMaxSpec.fit(train.y),
    )


def joint_unit_points(train: Dataset):
    """Stack predictors and target, scale each column onto [0, 1].

    Returns (points, lows, spans); a constant column scales to zeros and
    keeps span 0 so the inverse map restores the constant.
    """
    joint = np.column_stack([train.x, train.y])
    lows = joint.min(axis=0)
    spans = joint.max(axis=0) - lows
    safe = np.where(spans > 0.0, spans, 1.0)
    return (joint - lows) / safe, lows, spans


def build_from_clusters(
    train: Dataset, centers: np.ndarray, radius: float = 0.2, b: float = 2.0
) -> TskModel:
    """Cluster-seeded rule system: one rule per center.

    `centers` live in joint unit-scaled (predictors + target) space, as
    produced by clustering `joint_unit_points(train)`. Each center
    contributes one bell per input at its raw-unit coordinate with width
    radius * column span / sqrt(8) (floored), plus a constant consequent
    equal to the center's target coordinate in normalized target units.
    """
    centers = np.asarray(centers, dtype=float)
    if centers.ndim == 1:
        centers = centers.reshape(1, -1)
    m = train.n_inputs
    if centers.shape[0] < 1 or centers.shape[1] != m + 1:
        raise ParameterError(
            f"centers must be (k, {m + 1}) joint-space points, got shape {centers.shape}"
        )
    if radius <= 0:
        raise ParameterError("radius must be positive")
    _, lows, spans = joint_unit_points(train)
    centers_raw = lows + centers * np.where(spans > 0.0, spans, 0.0)
    target_norm = MinMaxSpec.fit(train.y)

    banks: list[list[BellMf]] = [[] for _ in range(m)]
    rules: list[TskRule] = []
    for k in range(centers.shape[0]):
        for i in range(m):
            span = float(spans[i])
            width = max(radius * span / np.sqrt(8.0), _width_floor(span))
            banks[i].append(
                BellMf(a=width, b=b, c=float(centers_raw[k, i]), label=f"cluster{k + 1}")
            )
        consequent = np.zeros(m + 1)
        consequent[-1] = float(target_norm.apply(centers_raw[k, m]))
        rules.append(TskRule(antecedent=(k,) * m, consequent=consequent))

    return TskModel(
        attribute_names=list(train.attribute_names),
        mf_banks=banks,
        rules=rules,
        input_norm=ZScoreSpec.fit(train.x),
        target_norm=target_norm,
    )


def build_clustered(
    train: Dataset,
    method: str = "fcm",
    n_clusters: int | None = None,
    radius: float = 0.2,
    b: float = 2.0,
    seed: int = 0,
) -> tuple[TskModel, ClusterResult]:
    """Cluster the training set in joint unit space, then build the rules.

    `method` picks the center finder: "fcm" (needs n_clusters) or
    "subtractive" (center count driven by radius).
    """
    if method not in ("fcm", "subtractive"):
        raise ParameterError(f"unknown clustering method {method!r}")
    points, _, _ = joint_unit_points(train)
    if method == "fcm":
        if n_clusters is None:
            raise ParameterError("fcm seeding needs n_clusters")
        result = fcm(points, c=int(n_clusters), seed=seed)
    else:
        result = subtractive(points, SubtractiveParams(radius=radius))
    model = build_from_clusters(train, result.centers, radius=radius, b=b)
    return model, result
