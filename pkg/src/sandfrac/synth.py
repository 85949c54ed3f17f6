"""Synthetic benchmark generator: three smooth, correlated attribute
fields over a survey grid, wells sampled on a finer time grid, and a
known nonlinear attribute-to-sand-fraction mixture for ground truth.

The target rule, exposed as `benchmark_mixture`, standardizes each
attribute with fixed constants

    u1 = (impedance - 6000) / 1200
    u2 = amplitude / 0.8
    u3 = (inst_freq - 25) / 6

and maps g = 1.6 u1 - 1.1 u2 + 0.8 u3 + 0.9 u1 u2 - 0.7 sin(1.5 u3)
through the logistic function 1 / (1 + exp(-g)). With zero noise, well
targets equal this mixture of the well's attribute columns exactly.

The `noise` level scales everything stochastic: well targets get
additive N(0, noise^2) clamped to [0, 1], and each cube attribute grid
gets N(0, (noise * attribute scale)^2) so models face noisy inputs while
the ground-truth cube stays noiseless.
"""

import csv
import os
from dataclasses import dataclass

import numpy as np

from .data import Dataset, write_dataset
from .errors import ParameterError
from .volume import CubeGeometry, write_cube_attribute

ATTRIBUTE_NAMES = ("impedance", "amplitude", "inst_freq")
ATTRIBUTE_CENTERS = {"impedance": 6000.0, "amplitude": 0.0, "inst_freq": 25.0}
ATTRIBUTE_SCALES = {"impedance": 1200.0, "amplitude": 0.8, "inst_freq": 6.0}
NOISE_COLUMN = "noise_attr"

_N_TERMS = 6
_FREQ_LO, _FREQ_HI = 0.3, 1.6
_LATENT_MIX = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.55, 0.835, 0.0],
        [0.0, 0.35, 0.937],
    ]
)
_WELL_MARGIN = 2


def benchmark_mixture(impedance, amplitude, inst_freq) -> np.ndarray:
    """The generator's attribute-to-sand-fraction rule (see module docs)."""
    u1 = (np.asarray(impedance, dtype=float) - 6000.0) / 1200.0
    u2 = np.asarray(amplitude, dtype=float) / 0.8
    u3 = (np.asarray(inst_freq, dtype=float) - 25.0) / 6.0
    g = 1.6 * u1 - 1.1 * u2 + 0.8 * u3 + 0.9 * u1 * u2 - 0.7 * np.sin(1.5 * u3)
    return 1.0 / (1.0 + np.exp(-g))


@dataclass
class SynthFields:
    """Three band-limited latent fields over a survey geometry.

    Each latent is a short sum of random-frequency cosines of the
    normalized (inline, crossline, time) coordinates, scaled to roughly
    unit variance; attributes are fixed linear mixes of the latents so
    they correlate like real seismic attributes.
    """

    geometry: CubeGeometry
    amps: np.ndarray      # (3, terms)
    freqs: np.ndarray     # (3, terms, 3)
    phases: np.ndarray    # (3, terms)

    @classmethod
    def make(cls, seed: int, geometry: CubeGeometry) -> "SynthFields":
        rng = np.random.default_rng(seed)
        amps = rng.uniform(0.5, 1.5, size=(3, _N_TERMS))
        freqs = rng.uniform(_FREQ_LO, _FREQ_HI, size=(3, _N_TERMS, 3))
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(3, _N_TERMS))
        return cls(geometry=geometry, amps=amps, freqs=freqs, phases=phases)

    def _coords(self, inline, crossline, t_ms):
        geo = self.geometry
        u = np.asarray(inline, dtype=float) / max(geo.n_inline - 1, 1)
        v = np.asarray(crossline, dtype=float) / max(geo.n_crossline - 1, 1)
        w = (np.asarray(t_ms, dtype=float) - geo.t0) / (geo.dt * max(geo.n_t - 1, 1))
        return np.broadcast_arrays(u, v, w)

    def latents(self, inline, crossline, t_ms) -> np.ndarray:
        """Latent field values; output shape (3,) + broadcast input shape."""
        u, v, w = self._coords(inline, crossline, t_ms)
        out = np.empty((3,) + u.shape)
        for j in range(3):
            acc = np.zeros_like(u)
            for k in range(_N_TERMS):
                fu, fv, fw = self.freqs[j, k]
                phase = 2.0 * np.pi * (fu * u + fv * v + fw * w) + self.phases[j, k]
                acc += self.amps[j, k] * np.cos(phase)
            out[j] = acc / np.sqrt(np.sum(self.amps[j] ** 2) / 2.0)
        return out

    def attributes(self, inline, crossline, t_ms) -> dict:
        """Noiseless raw-unit attribute values at the given coordinates."""
        z = np.tensordot(_LATENT_MIX, self.latents(inline, crossline, t_ms), axes=(1, 0))
        return {
            name: ATTRIBUTE_CENTERS[name] + ATTRIBUTE_SCALES[name] * z[i]
            for i, name in enumerate(ATTRIBUTE_NAMES)
        }

    def attribute_grids(self) -> dict:
        geo = self.geometry
        il = np.arange(geo.n_inline)[:, None, None]
        xl = np.arange(geo.n_crossline)[None, :, None]
        t = geo.times()[None, None, :]
        return self.attributes(il, xl, t)


def _well_positions(rng: np.random.Generator, geometry: CubeGeometry, n_wells: int):
    ni, nx = geometry.n_inline, geometry.n_crossline
    il_lo, il_hi = min(_WELL_MARGIN, ni - 1), max(ni - 1 - _WELL_MARGIN, 0)
    xl_lo, xl_hi = min(_WELL_MARGIN, nx - 1), max(nx - 1 - _WELL_MARGIN, 0)
    n_slots = (il_hi - il_lo + 1) * (xl_hi - xl_lo + 1)
    if n_wells > n_slots:
        raise ParameterError(f"grid too small for {n_wells} distinct well positions")
    flat = rng.permutation(n_slots)[:n_wells]
    width = xl_hi - xl_lo + 1
    return [(il_lo + int(f) // width, xl_lo + int(f) % width) for f in flat]


def _well_id(i: int) -> str:
    return chr(ord("A") + i) if i < 26 else f"W{i + 1}"


def generate(
    out_dir,
    seed: int = 7,
    n_wells: int = 6,
    n_inline: int = 64,
    n_crossline: int = 64,
    n_t: int = 128,
    t0: float = 1000.0,
    dt: float = 2.0,
    noise: float = 0.02,
    fine_divisor: int = 4,
) -> dict:
    """Write the full benchmark bundle into out_dir.

    Files: wells.csv (fine-time well samples with a spare pure-noise
    column), locations.csv, one cube file per attribute (noisy), and
    truth.sfcube holding the noiseless mixture output. Returns the paths
    plus the well position map. Deterministic per seed.
    """
    if n_wells < 1:
        raise ParameterError("need at least one well")
    if noise < 0:
        raise ParameterError("noise must be non-negative")
    if fine_divisor < 1:
        raise ParameterError("fine_divisor must be at least 1")
    geometry = CubeGeometry(n_inline=n_inline, n_crossline=n_crossline, n_t=n_t, t0=t0, dt=dt)
    seq = np.random.SeedSequence(seed)
    field_seed, cube_seed, well_seed = seq.spawn(3)
    fields = SynthFields.make(field_seed, geometry)

    os.makedirs(out_dir, exist_ok=True)
    grids = fields.attribute_grids()
    truth = benchmark_mixture(
        grids["impedance"], grids["amplitude"], grids["inst_freq"]
    )
    rng_cube = np.random.default_rng(cube_seed)
    cube_paths = []
    for name in ATTRIBUTE_NAMES:
        noisy = grids[name] + noise * ATTRIBUTE_SCALES[name] * rng_cube.standard_normal(
            geometry.shape
        )
        path = os.path.join(out_dir, f"{name}.sfcube")
        write_cube_attribute(path, geometry, name, noisy)
        cube_paths.append(path)
    truth_path = os.path.join(out_dir, "truth.sfcube")
    write_cube_attribute(truth_path, geometry, "sand_fraction", truth)

    rng_well = np.random.default_rng(well_seed)
    positions = _well_positions(rng_well, geometry, n_wells)
    n_fine = fine_divisor * (n_t - 1) + 1
    times = t0 + (dt / fine_divisor) * np.arange(n_fine)

    rows_x, rows_y, ids, row_times = [], [], [], []
    for i, (il, xl) in enumerate(positions):
        attrs = fields.attributes(il, xl, times)
        target = benchmark_mixture(attrs["impedance"], attrs["amplitude"], attrs["inst_freq"])
        if noise > 0:
            target = np.clip(target + noise * rng_well.standard_normal(n_fine), 0.0, 1.0)
        noise_col = rng_well.standard_normal(n_fine)
        rows_x.append(
            np.column_stack([attrs[name] for name in ATTRIBUTE_NAMES] + [noise_col])
        )
        rows_y.append(target)
        ids.extend([_well_id(i)] * n_fine)
        row_times.append(times)

    wells = Dataset(
        attribute_names=[*ATTRIBUTE_NAMES, NOISE_COLUMN],
        x=np.vstack(rows_x),
        y=np.concatenate(rows_y),
        well_ids=np.asarray(ids, dtype=object),
        times_ms=np.concatenate(row_times),
    )
    wells_path = os.path.join(out_dir, "wells.csv")
    write_dataset(wells, wells_path)

    locations_path = os.path.join(out_dir, "locations.csv")
    with open(locations_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["well_id", "inline", "crossline"])
        for i, (il, xl) in enumerate(positions):
            writer.writerow([_well_id(i), il, xl])

    return {
        "wells": wells_path,
        "locations": locations_path,
        "cubes": cube_paths,
        "truth": truth_path,
        "positions": {_well_id(i): pos for i, pos in enumerate(positions)},
        "geometry": geometry,
    }
