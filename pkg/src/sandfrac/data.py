"""Tabular sample handling and the well/dataset CSV interchange format.

A dataset CSV carries one row per (well, time) sample:

    well_id,time_ms,<attribute columns...>,sand_fraction

``well_id`` and ``time_ms`` tag each sample's origin, ``sand_fraction`` is the
regression target, and every other column is a predictor attribute.
All floats are written with %.17g so files round-trip exactly.
"""

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InputError

RESERVED_COLUMNS = ("well_id", "time_ms", "sand_fraction")


class Sample(NamedTuple):
    predictors: np.ndarray
    target: float
    well_id: str | None = None
    time_ms: float | None = None


@dataclass
class Dataset:
    """Aligned predictor rows and scalar targets with origin tags."""

    attribute_names: list[str]
    x: np.ndarray                      # (n, m) float64
    y: np.ndarray                      # (n,) float64
    well_ids: np.ndarray | None = None   # (n,) str
    times_ms: np.ndarray | None = None   # (n,) float64

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim == 1:
            self.x = self.x.reshape(-1, 1)
        if self.well_ids is not None:
            self.well_ids = np.asarray(self.well_ids, dtype=object)
        if self.times_ms is not None:
            self.times_ms = np.asarray(self.times_ms, dtype=float)
        self.validate()

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.x.shape[1]

    def __len__(self) -> int:
        return self.n_samples

    def validate(self):
        if self.x.ndim != 2:
            raise InputError("predictor array must be 2-D")
        n, m = self.x.shape
        if len(self.attribute_names) != m:
            raise InputError(
                f"{len(self.attribute_names)} attribute names for {m} predictor columns"
            )
        if self.y.shape != (n,):
            raise InputError(f"target length {self.y.shape} does not match {n} rows")
        if not np.all(np.isfinite(self.x)) or not np.all(np.isfinite(self.y)):
            raise InputError("dataset contains non-finite values")
        for arr, name in ((self.well_ids, "well_ids"), (self.times_ms, "times_ms")):
            if arr is not None and arr.shape != (n,):
                raise InputError(f"{name} length does not match {n} rows")

    def sample(self, i: int) -> Sample:
        return Sample(
            predictors=self.x[i].copy(),
            target=float(self.y[i]),
            well_id=None if self.well_ids is None else str(self.well_ids[i]),
            time_ms=None if self.times_ms is None else float(self.times_ms[i]),
        )

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices)
        return Dataset(
            attribute_names=list(self.attribute_names),
            x=self.x[idx].copy(),
            y=self.y[idx].copy(),
            well_ids=None if self.well_ids is None else self.well_ids[idx].copy(),
            times_ms=None if self.times_ms is None else self.times_ms[idx].copy(),
        )

    def select_attributes(self, names: list[str]) -> "Dataset":
        """Return a dataset restricted to the named predictor columns."""
        missing = [n for n in names if n not in self.attribute_names]
        if missing:
            raise InputError(f"unknown attribute column(s): {', '.join(missing)}")
        cols = [self.attribute_names.index(n) for n in names]
        return Dataset(
            attribute_names=list(names),
            x=self.x[:, cols].copy(),
            y=self.y.copy(),
            well_ids=None if self.well_ids is None else self.well_ids.copy(),
            times_ms=None if self.times_ms is None else self.times_ms.copy(),
        )


@dataclass
class WellSeries:
    """One well's time-ordered log samples."""

    well_id: str
    times_ms: np.ndarray                       # strictly increasing
    attributes: dict[str, np.ndarray] = field(default_factory=dict)
    sand_fraction: np.ndarray | None = None

    def __post_init__(self):
        self.times_ms = np.asarray(self.times_ms, dtype=float)
        self.attributes = {k: np.asarray(v, dtype=float) for k, v in self.attributes.items()}
        if self.sand_fraction is not None:
            self.sand_fraction = np.asarray(self.sand_fraction, dtype=float)
        self.validate()

    def validate(self):
        n = self.times_ms.shape[0]
        if n == 0:
            raise InputError(f"well {self.well_id}: no samples")
        if np.any(np.diff(self.times_ms) <= 0):
            raise InputError(f"well {self.well_id}: times must be strictly increasing")
        for name, vals in self.attributes.items():
            if vals.shape != (n,):
                raise InputError(f"well {self.well_id}: column {name} length mismatch")
        if self.sand_fraction is not None:
            if self.sand_fraction.shape != (n,):
                raise InputError(f"well {self.well_id}: sand_fraction length mismatch")
            if not np.all(np.isfinite(self.sand_fraction)):
                raise InputError(f"well {self.well_id}: non-finite sand_fraction")
            if np.any(self.sand_fraction < 0) or np.any(self.sand_fraction > 1):
                raise InputError(f"well {self.well_id}: sand_fraction outside [0, 1]")

    def __len__(self) -> int:
        return self.times_ms.shape[0]


def _fmt(v: float) -> str:
    return "%.17g" % v


def _parse_float(text: str, path, line_no: int, col: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"{path}:{line_no}: cannot parse {col}={text!r}") from None


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, header required") from None
        header = [h.strip() for h in header]
        rows = [row for row in reader if row and any(c.strip() for c in row)]
    return header, rows


def load_dataset(path, attributes: list[str] | None = None) -> Dataset:
    """Read a dataset CSV; `attributes` optionally restricts/reorders columns."""
    header, rows = _read_rows(path)
    for col in ("well_id", "time_ms", "sand_fraction"):
        if col not in header:
            raise InputError(f"{path}: missing required column {col!r}")
    attr_names = [h for h in header if h not in RESERVED_COLUMNS]
    if not attr_names:
        raise InputError(f"{path}: no predictor attribute columns")
    idx = {h: i for i, h in enumerate(header)}

    n = len(rows)
    well_ids = np.empty(n, dtype=object)
    times = np.empty(n)
    y = np.empty(n)
    x = np.empty((n, len(attr_names)))
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise InputError(f"{path}:{r + 2}: expected {len(header)} fields, got {len(row)}")
        well_ids[r] = row[idx["well_id"]].strip()
        times[r] = _parse_float(row[idx["time_ms"]], path, r + 2, "time_ms")
        y[r] = _parse_float(row[idx["sand_fraction"]], path, r + 2, "sand_fraction")
        for c, name in enumerate(attr_names):
            x[r, c] = _parse_float(row[idx[name]], path, r + 2, name)

    ds = Dataset(attribute_names=attr_names, x=x, y=y, well_ids=well_ids, times_ms=times)
    if attributes is not None:
        ds = ds.select_attributes(list(attributes))
    return ds


def write_dataset(ds: Dataset, path):
    """Write a Dataset as a dataset CSV (full round-trip float precision)."""
    if ds.well_ids is None or ds.times_ms is None:
        raise InputError("dataset CSV requires well_id and time_ms tags")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["well_id", "time_ms", *ds.attribute_names, "sand_fraction"])
        for i in range(ds.n_samples):
            writer.writerow(
                [
                    str(ds.well_ids[i]),
                    _fmt(ds.times_ms[i]),
                    *(_fmt(v) for v in ds.x[i]),
                    _fmt(ds.y[i]),
                ]
            )


def read_well_csv(path) -> list[WellSeries]:
    """Read a well CSV into one WellSeries per distinct well id.

    Wells appear in order of first occurrence; each well's rows must be in
    strictly increasing time order.
    """
    ds = load_dataset(path)
    order: list[str] = []
    seen = {}
    for wid in ds.well_ids:
        if wid not in seen:
            seen[wid] = True
            order.append(wid)
    wells = []
    for wid in order:
        mask = ds.well_ids == wid
        wells.append(
            WellSeries(
                well_id=str(wid),
                times_ms=ds.times_ms[mask],
                attributes={name: ds.x[mask, i] for i, name in enumerate(ds.attribute_names)},
                sand_fraction=ds.y[mask],
            )
        )
    return wells


def read_locations_csv(path) -> dict[str, tuple[int, int]]:
    """Read `well_id,inline,crossline` rows into a lookup table."""
    header, rows = _read_rows(path)
    required = ["well_id", "inline", "crossline"]
    for col in required:
        if col not in header:
            raise InputError(f"{path}: missing required column {col!r}")
    idx = {h: i for i, h in enumerate(header)}
    out: dict[str, tuple[int, int]] = {}
    for r, row in enumerate(rows):
        wid = row[idx["well_id"]].strip()
        try:
            il = int(row[idx["inline"]])
            xl = int(row[idx["crossline"]])
        except ValueError:
            raise InputError(f"{path}:{r + 2}: inline/crossline must be integers") from None
        out[wid] = (il, xl)
    return out
