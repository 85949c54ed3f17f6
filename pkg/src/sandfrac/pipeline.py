"""Data preparation: resampling, normalization, splitting, and error metrics.

Normalization specs are fitted on training data only and stored with every
model so that raw-unit inputs and outputs round-trip exactly.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .data import Dataset, WellSeries
from .errors import InputError, OutOfRangeError, ParameterError, UndefinedMetricError

_STD_FLOOR_SCALE = 1e-12


@dataclass
class ZScoreSpec:
    """Per-column standardization: (x - mean) / std, population std."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.std = np.atleast_1d(np.asarray(self.std, dtype=float))
        if self.mean.shape != self.std.shape:
            raise ParameterError("mean and std must have matching shapes")
        if np.any(self.std <= 0):
            raise ParameterError("std entries must be positive")

    @classmethod
    def fit(cls, x: np.ndarray) -> "ZScoreSpec":
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.shape[0] == 0:
            raise ParameterError("cannot fit normalization on empty data")
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        floor = _STD_FLOOR_SCALE * np.maximum(np.abs(mean), 1.0)
        low = std < floor
        if np.any(low):
            warnings.warn(
                "near-constant column(s) %s: std floored" % np.nonzero(low)[0].tolist(),
                RuntimeWarning,
                stacklevel=2,
            )
            std = np.where(low, np.maximum(floor, _STD_FLOOR_SCALE), std)
        return cls(mean=mean, std=std)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x - self.mean) / self.std

    def invert(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ZScoreSpec":
        return cls(mean=np.asarray(d["mean"]), std=np.asarray(d["std"]))


@dataclass
class MinMaxSpec:
    """Affine map sending [low, high] onto [new_low, new_high]; no clamping."""

    low: float
    high: float
    new_low: float = 0.0
    new_high: float = 1.0

    def __post_init__(self):
        self.low = float(self.low)
        self.high = float(self.high)
        self.new_low = float(self.new_low)
        self.new_high = float(self.new_high)
        if not self.high > self.low:
            raise ParameterError("min-max spec requires high > low")
        if not self.new_high > self.new_low:
            raise ParameterError("min-max spec requires new_high > new_low")

    @classmethod
    def fit(cls, y: np.ndarray, new_low: float = 0.0, new_high: float = 1.0) -> "MinMaxSpec":
        y = np.asarray(y, dtype=float)
        if y.size == 0:
            raise ParameterError("cannot fit normalization on empty data")
        low, high = float(y.min()), float(y.max())
        if high == low:
            raise ParameterError("cannot fit min-max spec on constant data")
        return cls(low=low, high=high, new_low=new_low, new_high=new_high)

    def apply(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        unit = (y - self.low) / (self.high - self.low)
        return unit * (self.new_high - self.new_low) + self.new_low

    def invert(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        unit = (u - self.new_low) / (self.new_high - self.new_low)
        return unit * (self.high - self.low) + self.low

    def to_dict(self) -> dict:
        return {
            "low": self.low,
            "high": self.high,
            "new_low": self.new_low,
            "new_high": self.new_high,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MinMaxSpec":
        return cls(
            low=d["low"],
            high=d["high"],
            new_low=d.get("new_low", 0.0),
            new_high=d.get("new_high", 1.0),
        )


def spline_resample(times: np.ndarray, values: np.ndarray, new_times: np.ndarray) -> np.ndarray:
    """Cubic-spline interpolation of a series onto new sample times.

    Knot times must be strictly increasing with at least 4 points; requests
    outside the knot span are refused rather than extrapolated.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    new_times = np.asarray(new_times, dtype=float)
    if times.ndim != 1 or times.shape != values.shape:
        raise InputError("times and values must be 1-D arrays of equal length")
    if times.size < 4:
        raise InputError(f"cubic resampling needs at least 4 samples, got {times.size}")
    if np.any(np.diff(times) <= 0):
        raise InputError("sample times must be strictly increasing")
    outside = (new_times < times[0]) | (new_times > times[-1])
    if np.any(outside):
        bad = new_times[outside]
        shown = ", ".join("%g" % t for t in bad[:5])
        more = "" if bad.size <= 5 else f" (+{bad.size - 5} more)"
        raise OutOfRangeError(
            f"requested times outside [{times[0]:g}, {times[-1]:g}]: {shown}{more}"
        )
    return CubicSpline(times, values, bc_type="not-a-knot")(new_times)


def resample_well(well: WellSeries, new_times: np.ndarray) -> WellSeries:
    """Resample every attribute of a well onto a new time axis.

    Sand fraction is resampled the same way and clamped back into [0, 1],
    since splines can overshoot between knots.
    """
    new_times = np.asarray(new_times, dtype=float)
    attrs = {
        name: spline_resample(well.times_ms, vals, new_times)
        for name, vals in well.attributes.items()
    }
    sf = None
    if well.sand_fraction is not None:
        sf = np.clip(spline_resample(well.times_ms, well.sand_fraction, new_times), 0.0, 1.0)
    return WellSeries(
        well_id=well.well_id, times_ms=new_times, attributes=attrs, sand_fraction=sf
    )


def wells_to_dataset(wells: list[WellSeries], attributes: list[str] | None = None) -> Dataset:
    """Stack well series into one sample table (wells in given order)."""
    if not wells:
        raise InputError("no wells provided")
    if attributes is None:
        attributes = list(wells[0].attributes.keys())
    rows_x, rows_y, ids, times = [], [], [], []
    for well in wells:
        missing = [a for a in attributes if a not in well.attributes]
        if missing:
            raise InputError(f"well {well.well_id}: missing attribute(s) {', '.join(missing)}")
        if well.sand_fraction is None:
            raise InputError(f"well {well.well_id}: no sand_fraction column")
        rows_x.append(np.column_stack([well.attributes[a] for a in attributes]))
        rows_y.append(well.sand_fraction)
        ids.extend([well.well_id] * len(well))
        times.append(well.times_ms)
    return Dataset(
        attribute_names=list(attributes),
        x=np.vstack(rows_x),
        y=np.concatenate(rows_y),
        well_ids=np.asarray(ids, dtype=object),
        times_ms=np.concatenate(times),
    )


def random_split(ds: Dataset, train_fraction: float = 0.7, seed: int = 0):
    """Shuffle samples with a seeded permutation and split train/test.

    Train gets floor(train_fraction * n) samples; both splits must be
    non-empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ParameterError("train_fraction must be in (0, 1)")
    n = ds.n_samples
    n_train = int(np.floor(train_fraction * n))
    if n_train < 1 or n - n_train < 1:
        raise ParameterError(f"split of {n} samples at {train_fraction} leaves an empty side")
    perm = np.random.default_rng(seed).permutation(n)
    return ds.subset(perm[:n_train]), ds.subset(perm[n_train:])


def _paired(x, y):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InputError("metric inputs must have equal lengths")
    if x.size == 0:
        raise InputError("metric inputs are empty")
    return x, y


def cc(x, y) -> float:
    """Pearson correlation coefficient between paired series."""
    x, y = _paired(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if denom == 0.0:
        raise UndefinedMetricError("correlation undefined: a series has zero variance")
    return float(np.sum(dx * dy) / denom)


def rmse(x, y) -> float:
    """Root-mean-square error between paired series."""
    x, y = _paired(x, y)
    return float(np.sqrt(np.mean((x - y) ** 2)))


def aem(x, y) -> float:
    """Mean absolute error between paired series."""
    x, y = _paired(x, y)
    return float(np.mean(np.abs(x - y)))


def si(x, y) -> float:
    """Scatter index: RMSE divided by the mean of the reference series y."""
    x, y = _paired(x, y)
    ybar = y.mean()
    if ybar == 0.0:
        raise UndefinedMetricError("scatter index undefined: reference mean is zero")
    return float(np.sqrt(np.mean((x - y) ** 2)) / ybar)


def metric_bundle(predicted, actual) -> dict[str, float]:
    """All four metrics; undefined entries come back as nan."""
    out = {}
    for name, fn in (("cc", cc), ("rmse", rmse), ("aem", aem), ("si", si)):
        try:
            out[name] = fn(predicted, actual)
        except UndefinedMetricError:
            out[name] = float("nan")
    return out
