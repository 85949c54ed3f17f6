"""Gridded seismic volumes: file IO, whole-cube inference, per-inline
median smoothing, and slice export.

Cube files are one attribute per file: an ASCII header line

    SFCUBE1 n_inline n_crossline n_t t0 dt attr_name

followed by the row-major (inline, crossline, time) grid as little-endian
32-bit floats. Quiet NaN is the null sentinel.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import WellSeries
from .errors import ConfigError, InputError, ParameterError
from .fis import TskModel, infer_batch
from .mlp import MlpModel, mlp_infer

CUBE_MAGIC = "SFCUBE1"
_INFER_CHUNK = 65536


@dataclass(frozen=True)
class CubeGeometry:
    n_inline: int
    n_crossline: int
    n_t: int
    t0: float
    dt: float

    def __post_init__(self):
        if min(self.n_inline, self.n_crossline, self.n_t) < 1:
            raise ParameterError("cube dimensions must be positive")
        if not self.dt > 0:
            raise ParameterError("time step must be positive")

    @property
    def shape(self) -> tuple:
        return (self.n_inline, self.n_crossline, self.n_t)

    @property
    def n_cells(self) -> int:
        return self.n_inline * self.n_crossline * self.n_t

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_t)


@dataclass
class SeismicCube:
    """Co-registered attribute grids on one survey geometry."""

    geometry: CubeGeometry
    attributes: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for name in list(self.attributes):
            self.attributes[name] = self._check_grid(name, self.attributes[name])

    def _check_grid(self, name: str, grid: np.ndarray) -> np.ndarray:
        grid = np.asarray(grid, dtype=float)
        if grid.shape != self.geometry.shape:
            raise InputError(
                f"attribute {name!r} grid shape {grid.shape} != cube {self.geometry.shape}"
            )
        if np.any(np.isinf(grid)):
            raise InputError(f"attribute {name!r} contains infinities")
        return grid

    def add_attribute(self, name: str, grid: np.ndarray):
        self.attributes[name] = self._check_grid(name, grid)

    def trace(self, name: str, inline: int, crossline: int) -> np.ndarray:
        return self.attributes[name][inline, crossline, :]


@dataclass
class PropertyCube:
    """Predicted property grid plus a mask of cells with no valid value."""

    geometry: CubeGeometry
    values: np.ndarray                 # (ni, nx, nt), NaN where masked
    mask: np.ndarray                   # True = no valid prediction
    n_clamped: int = 0
    n_degenerate: int = 0
    n_null_input: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.shape != self.geometry.shape or self.mask.shape != self.geometry.shape:
            raise InputError("property grid shape does not match its geometry")


def write_cube_attribute(path, geometry: CubeGeometry, name: str, grid: np.ndarray):
    """Write one attribute grid in the cube file format."""
    if not name or any(ch.isspace() for ch in name):
        raise InputError(f"attribute name {name!r} must be non-empty without whitespace")
    grid = np.asarray(grid, dtype=float)
    if grid.shape != geometry.shape:
        raise InputError(f"grid shape {grid.shape} != geometry {geometry.shape}")
    header = "%s %d %d %d %.17g %.17g %s\n" % (
        CUBE_MAGIC,
        geometry.n_inline,
        geometry.n_crossline,
        geometry.n_t,
        geometry.t0,
        geometry.dt,
        name,
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(grid, dtype="<f4").tobytes())


def read_cube_attribute(path) -> tuple[CubeGeometry, str, np.ndarray]:
    """Read one cube attribute file; returns (geometry, name, grid)."""
    with open(path, "rb") as fh:
        header = bytearray()
        while True:
            ch = fh.read(1)
            if not ch:
                raise InputError(f"{path}: truncated header")
            if ch == b"\n":
                break
            header.extend(ch)
            if len(header) > 4096:
                raise InputError(f"{path}: header line too long; not a cube file")
        parts = header.decode("ascii", errors="replace").split()
        if len(parts) != 7 or parts[0] != CUBE_MAGIC:
            raise InputError(f"{path}: expected a '{CUBE_MAGIC} ...' header line")
        try:
            ni, nx, nt = int(parts[1]), int(parts[2]), int(parts[3])
            t0, dt = float(parts[4]), float(parts[5])
        except ValueError:
            raise InputError(f"{path}: malformed header numbers") from None
        name = parts[6]
        geometry = CubeGeometry(n_inline=ni, n_crossline=nx, n_t=nt, t0=t0, dt=dt)
        raw = fh.read(4 * geometry.n_cells)
        if len(raw) != 4 * geometry.n_cells:
            raise InputError(f"{path}: expected {geometry.n_cells} float32 cells, file truncated")
        if fh.read(1):
            raise InputError(f"{path}: trailing bytes after the value grid")
    grid = np.frombuffer(raw, dtype="<f4").astype(float).reshape(geometry.shape)
    return geometry, name, grid


def load_cubes(paths) -> SeismicCube:
    """Read several attribute files sharing one geometry into a cube."""
    if not paths:
        raise InputError("no cube files given")
    cube = None
    for path in paths:
        geometry, name, grid = read_cube_attribute(path)
        if cube is None:
            cube = SeismicCube(geometry=geometry)
        elif geometry != cube.geometry:
            raise InputError(f"{path}: geometry {geometry} differs from the first file's")
        if name in cube.attributes:
            raise InputError(f"{path}: duplicate attribute {name!r}")
        cube.add_attribute(name, grid)
    return cube


def _infer_cells(model, x: np.ndarray):
    if isinstance(model, TskModel):
        return infer_batch(model, x, return_flags=True)
    y = mlp_infer(model, x)
    return y, {"degenerate": np.zeros(x.shape[0], dtype=bool)}


def predict_cube(
    model: TskModel | MlpModel, cube: SeismicCube, chunk: int = _INFER_CHUNK
) -> PropertyCube:
    """Run the model over every cell of the cube.

    Cells with a null (NaN) input are masked, as are cells whose rule
    firing underflowed. Predictions are clamped to [0, 1] and the clamp
    count is recorded.
    """
    missing = [n for n in model.attribute_names if n not in cube.attributes]
    if missing:
        raise ConfigError(f"cube lacks model input(s): {', '.join(missing)}")
    n = cube.geometry.n_cells
    x = np.column_stack(
        [cube.attributes[name].reshape(n) for name in model.attribute_names]
    )
    null_rows = np.any(np.isnan(x), axis=1)
    values = np.full(n, np.nan)
    degenerate = np.zeros(n, dtype=bool)
    n_clamped = 0

    live_idx = np.nonzero(~null_rows)[0]
    for start in range(0, live_idx.size, chunk):
        idx = live_idx[start : start + chunk]
        y, flags = _infer_cells(model, x[idx])
        n_clamped += int(np.count_nonzero((y < 0.0) | (y > 1.0)))
        values[idx] = np.clip(y, 0.0, 1.0)
        degenerate[idx] = flags["degenerate"]

    mask = null_rows | degenerate
    values[mask] = np.nan
    shape = cube.geometry.shape
    return PropertyCube(
        geometry=cube.geometry,
        values=values.reshape(shape),
        mask=mask.reshape(shape),
        n_clamped=n_clamped,
        n_degenerate=int(np.count_nonzero(degenerate)),
        n_null_input=int(np.count_nonzero(null_rows)),
    )


def median_filter_inline(image: np.ndarray, window: tuple = (3, 5)) -> np.ndarray:
    """2-D median filter of one crossline-by-time image.

    Odd window dims, replicate padding at the borders. NaN cells are
    ignored in each neighborhood; a cell comes back NaN only when its
    whole neighborhood is NaN.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ParameterError("expected a 2-D crossline-by-time image")
    wc, wt = int(window[0]), int(window[1])
    if wc < 1 or wt < 1 or wc % 2 == 0 or wt % 2 == 0:
        raise ParameterError("window dimensions must be odd and positive")
    padded = np.pad(image, ((wc // 2, wc // 2), (wt // 2, wt // 2)), mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, (wc, wt))
    if np.any(np.isnan(image)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return np.nanmedian(windows, axis=(2, 3))
    return np.median(windows, axis=(2, 3))


def smooth_cube(pcube: PropertyCube, window: tuple = (3, 5)) -> PropertyCube:
    """Median-filter every inline slice of a property cube independently.

    Masked cells are excluded from neighborhoods; a cell stays masked
    only if its entire neighborhood is masked.
    """
    values = np.empty_like(pcube.values)
    for i in range(pcube.geometry.n_inline):
        values[i] = median_filter_inline(pcube.values[i], window)
    mask = np.isnan(values)
    return PropertyCube(
        geometry=pcube.geometry,
        values=values,
        mask=mask,
        n_clamped=pcube.n_clamped,
        n_degenerate=pcube.n_degenerate,
        n_null_input=pcube.n_null_input,
    )


def export_slice(
    pcube: PropertyCube,
    inline_index: int,
    path,
    overlay_well: WellSeries | None = None,
    overlay_location: tuple | None = None,
    overlay_path=None,
):
    """Write one inline slice as a CSV grid (rows = time, cols = crossline).

    With an overlay well and its (inline, crossline) location, also write
    a CSV of (time_ms, target, predicted) pairs at that trace: one row per
    well sample inside the cube's time span, predictions taken at the
    nearest time sample. Returns the written arrays for plotting.
    """
    geo = pcube.geometry
    if not 0 <= inline_index < geo.n_inline:
        raise InputError(f"inline index {inline_index} outside [0, {geo.n_inline - 1}]")
    grid = pcube.values[inline_index].T          # (n_t, n_crossline)
    with open(path, "w", encoding="utf-8") as fh:
        for row in grid:
            fh.write(",".join("%.17g" % v for v in row))
            fh.write("\n")

    if overlay_well is None:
        return {"grid": grid, "overlay": None}
    if overlay_location is None or overlay_path is None:
        raise InputError("well overlay needs a location and an output path")
    il, xl = int(overlay_location[0]), int(overlay_location[1])
    if not (0 <= il < geo.n_inline and 0 <= xl < geo.n_crossline):
        raise InputError(f"overlay location ({il}, {xl}) outside the cube grid")
    if overlay_well.sand_fraction is None:
        raise InputError(f"well {overlay_well.well_id}: no sand_fraction to overlay")
    t_lo, t_hi = geo.t0, geo.t0 + geo.dt * (geo.n_t - 1)
    inside = (overlay_well.times_ms >= t_lo) & (overlay_well.times_ms <= t_hi)
    times = overlay_well.times_ms[inside]
    targets = overlay_well.sand_fraction[inside]
    t_idx = np.rint((times - geo.t0) / geo.dt).astype(int)
    t_idx = np.clip(t_idx, 0, geo.n_t - 1)
    predicted = pcube.values[il, xl, t_idx]
    with open(overlay_path, "w", encoding="utf-8") as fh:
        fh.write("time_ms,target,predicted\n")
        for t, tgt, pred in zip(times, targets, predicted):
            fh.write("%.17g,%.17g,%.17g\n" % (t, tgt, pred))
    return {"grid": grid, "overlay": (times, targets, predicted)}
