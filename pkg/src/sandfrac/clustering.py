"""Cluster finders used to seed fuzzy rules: hard k-means, fuzzy c-means,
and potential-based subtractive clustering.

All three take an (n, d) sample matrix and report centers in the same
units as the input. Subtractive clustering expects inputs pre-scaled to
the unit hypercube, since its radii are relative to that cube.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ParameterError

_CHUNK = 2048


@dataclass
class ClusterResult:
    centers: np.ndarray                 # (c, d)
    labels: np.ndarray                  # (n,) nearest/argmax assignment
    membership: np.ndarray | None       # (c, n) for fuzzy methods
    n_iter: int
    converged: bool
    final_cost: float = float("nan")
    history: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return self.centers.shape[0]


@dataclass
class SubtractiveParams:
    """Knobs for subtractive clustering over unit-cube data.

    `radius` sets a center's zone of influence; `squash * radius` is the
    larger radius used to suppress potential around an accepted center.
    `accept` and `reject` are fractions of the first center's potential.
    """

    radius: float = 0.2
    squash: float = 1.25
    accept: float = 0.5
    reject: float = 0.15
    max_centers: int | None = None

    def __post_init__(self):
        if not 0.0 < self.radius <= 1.0:
            raise ParameterError("radius must be in (0, 1] for unit-scaled data")
        if self.squash <= 1.0:
            raise ParameterError("squash must exceed 1")
        if not 0.0 < self.reject < self.accept <= 1.0:
            raise ParameterError("need 0 < reject < accept <= 1")
        if self.max_centers is not None and self.max_centers < 1:
            raise ParameterError("max_centers must be at least 1")


def _as_points(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ParameterError("need a non-empty (n, d) sample matrix")
    if not np.all(np.isfinite(x)):
        raise ParameterError("samples contain non-finite values")
    return x


def _maximin_seeds(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Farthest-point seeding: random first pick, then repeatedly the point
    furthest from its nearest already-chosen seed (ties to lowest index)."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d_min = cdist(x, x[chosen[-1]][None]).ravel()
    while len(chosen) < k:
        chosen.append(int(np.argmax(d_min)))
        d_min = np.minimum(d_min, cdist(x, x[chosen[-1]][None]).ravel())
    return x[chosen].copy()


def kmeans(x: np.ndarray, k: int, seed: int = 0, max_iter: int = 200) -> ClusterResult:
    """Hard k-means with farthest-point seeding.

    The recorded cost is the sum of squared distances right after each
    assignment step, which is non-increasing. An emptied cluster is
    re-seeded at the point currently farthest from its own center.
    """
    x = _as_points(x)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _maximin_seeds(x, k, rng)

    labels = np.full(n, -1)
    cost_history = []
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = cdist(x, centers, metric="sqeuclidean")
        new_labels = np.argmin(d2, axis=1)
        cost_history.append(float(d2[np.arange(n), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        own = d2[np.arange(n), labels]
        for j in range(k):
            members = labels == j
            if np.any(members):
                centers[j] = x[members].mean(axis=0)
            else:
                far = int(np.argmax(own))
                centers[j] = x[far]
                own[far] = 0.0
    return ClusterResult(
        centers=centers,
        labels=labels,
        membership=None,
        n_iter=n_iter,
        converged=converged,
        final_cost=cost_history[-1],
        history={"cost": cost_history},
    )


def fcm(
    x: np.ndarray,
    c: int,
    m: float = 2.0,
    tol: float = 1e-5,
    max_iter: int = 200,
    seed: int = 0,
) -> ClusterResult:
    """Fuzzy c-means with fuzzifier m.

    Membership U is (c, n) with unit column sums. A sample landing exactly
    on one or more centers gets its membership split evenly among those
    centers. The recorded cost sequence is non-increasing.
    """
    x = _as_points(x)
    n = x.shape[0]
    if not 1 <= c <= n:
        raise ParameterError(f"c must be in [1, {n}], got {c}")
    if m <= 1.0:
        raise ParameterError(f"fuzzifier m must exceed 1, got {m}")
    rng = np.random.default_rng(seed)
    u = rng.random((c, n))
    u /= u.sum(axis=0, keepdims=True)

    power = 2.0 / (m - 1.0)
    cost_history = []
    colsum_history = []
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        um = u**m
        centers = (um @ x) / um.sum(axis=1, keepdims=True)
        d2 = cdist(centers, x, metric="sqeuclidean")
        zero = d2 == 0.0
        with np.errstate(divide="ignore"):
            inv = d2 ** (-power / 2.0)
        u_new = np.where(zero, 0.0, inv)
        hit = zero.any(axis=0)
        u_new[:, hit] = zero[:, hit]
        u_new /= u_new.sum(axis=0, keepdims=True)

        cost_history.append(float(np.sum(u_new**m * d2)))
        colsum_history.append(float(np.abs(u_new.sum(axis=0) - 1.0).max()))
        delta = float(np.abs(u_new - u).max())
        u = u_new
        if delta < tol:
            converged = True
            break
    um = u**m
    centers = (um @ x) / um.sum(axis=1, keepdims=True)
    return ClusterResult(
        centers=centers,
        labels=np.argmax(u, axis=0),
        membership=u,
        n_iter=n_iter,
        converged=converged,
        final_cost=cost_history[-1],
        history={"cost": cost_history, "u_colsum_max_dev": colsum_history},
    )


def _potentials(x: np.ndarray, alpha: float) -> np.ndarray:
    """P_i = sum_j exp(-alpha * ||x_i - x_j||^2), computed in row chunks."""
    n = x.shape[0]
    p = np.empty(n)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        d2 = cdist(x[start:stop], x, metric="sqeuclidean")
        p[start:stop] = np.exp(-alpha * d2).sum(axis=1)
    return p


def subtractive(x: np.ndarray, params: SubtractiveParams | None = None) -> ClusterResult:
    """Subtractive clustering: pick density peaks, suppress their zone, repeat.

    Acceptance follows the usual three-band scheme on the ratio to the
    first peak's potential: above `accept` take the point, below `reject`
    stop, and in between take it only if closeness to existing centers is
    offset by potential (min-distance/radius + ratio >= 1), otherwise zero
    that candidate and move on. Ties pick the lowest sample index.
    """
    x = _as_points(x)
    if params is None:
        params = SubtractiveParams()
    alpha = 4.0 / params.radius**2
    beta = 4.0 / (params.squash * params.radius) ** 2

    p = _potentials(x, alpha)
    first_peak = float(p.max())
    if first_peak <= 0.0:
        raise ParameterError("all potentials are zero; radius too small")

    centers_idx: list[int] = []
    accepted_potential: list[float] = []
    while True:
        i = int(np.argmax(p))
        p_i = float(p[i])
        ratio = p_i / first_peak
        if ratio > params.accept or not centers_idx:
            take = True
        elif ratio < params.reject:
            break
        else:
            d_min = float(cdist(x[i][None], x[centers_idx]).min())
            take = d_min / params.radius + ratio >= 1.0
        if not take:
            p[i] = 0.0
            continue
        centers_idx.append(i)
        accepted_potential.append(p_i)
        p = p - p_i * np.exp(-beta * cdist(x, x[i][None], metric="sqeuclidean").ravel())
        np.maximum(p, 0.0, out=p)
        if params.max_centers is not None and len(centers_idx) >= params.max_centers:
            break
        if float(p.max()) < params.reject * first_peak:
            break

    centers = x[centers_idx].copy()
    labels = np.argmin(cdist(x, centers, metric="sqeuclidean"), axis=1)
    return ClusterResult(
        centers=centers,
        labels=labels,
        membership=None,
        n_iter=len(centers_idx),
        converged=True,
        final_cost=float(p.max()),
        history={"potential": accepted_potential},
    )
