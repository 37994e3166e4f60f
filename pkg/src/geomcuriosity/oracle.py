"""Geometry-free checks of epistemic value that avoid the Gaussian closed form.

``ball_epistemic_value`` evaluates the ball-kernel entropy integral

    C(psi_* Q) = -(1 / |B_eps|) * integral dy  q(y) ln q(y),
    q(y) = Q(psi^{-1}(B_y^eps)),

on a regular node grid, with ``q`` estimated by counting mapped samples.
``mc_mutual_information`` is a plain Monte Carlo estimate of I(X; Y) for a
Gaussian belief and Gaussian sensor.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.stats import multivariate_normal

from ._validation import check_positive, check_random_state
from .belief import joint_moments
from .exceptions import InsufficientCoverage
from .geometry import frame_map, rho, transition_map, GeometryKind

MIN_CLOUD = 10_000
MAX_NODES = 4_000_000
COVERAGE_LOSS = 0.01
_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class SampleCloud:
    """Equally weighted sample standing in for a belief."""

    points: np.ndarray
    seed: int = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be (n, d)")
        if pts.shape[0] < MIN_CLOUD:
            raise ValueError(f"a sample cloud needs at least {MIN_CLOUD} points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def weights(self):
        return np.full(self.n, 1.0 / self.n)

    @classmethod
    def from_belief(cls, belief, n, seed):
        return cls(belief.sample(n, np.random.default_rng(seed)), seed)


@dataclass(frozen=True, eq=False)
class NodeGrid:
    """Regular grid ``origin + spacing * index`` with ``shape`` nodes per axis."""

    origin: np.ndarray
    spacing: float
    shape: tuple

    @property
    def dim(self):
        return len(self.shape)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def cell_volume(self):
        return self.spacing ** self.dim

    @property
    def nodes(self):
        axes = [self.origin[i] + self.spacing * np.arange(n) for i, n in enumerate(self.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)

    @property
    def upper(self):
        return self.origin + self.spacing * (np.asarray(self.shape) - 1)

    @classmethod
    def covering(cls, points, epsilon, half_width_sigmas=5.0, spacing=None):
        """Grid over mean +/- ``half_width_sigmas`` std of ``points``, spacing <= eps/2."""
        epsilon = check_positive(epsilon, "epsilon")
        points = np.asarray(points, dtype=float)
        spacing = epsilon / 2 if spacing is None else min(spacing, epsilon / 2)
        center = points.mean(axis=0)
        half = np.maximum(half_width_sigmas * points.std(axis=0), 2 * epsilon)
        per_axis = np.ceil(2 * half / spacing).astype(int) + 1
        size = int(np.prod(per_axis))
        if size > MAX_NODES:
            raise ValueError(f"node grid would need {size} nodes (limit {MAX_NODES})")
        origin = center - spacing * (per_axis - 1) / 2
        return cls(origin, float(spacing), tuple(int(n) for n in per_axis))


def ball_volume(epsilon, dim):
    return math.pi ** (dim / 2) / gamma_fn(dim / 2 + 1) * epsilon ** dim


def _ball_incidence(points, grid, epsilon):
    """Yield ``(point_idx, node_flat_idx)`` pairs with ``|node - point| <= eps``."""
    d = grid.dim
    reach = int(math.ceil(epsilon / grid.spacing))
    rng1 = np.arange(-reach, reach + 2)
    offsets = np.stack(np.meshgrid(*([rng1] * d), indexing="ij"), axis=-1).reshape(-1, d)
    shape = np.asarray(grid.shape)
    for start in range(0, points.shape[0], _CHUNK):
        chunk = points[start:start + _CHUNK]
        base = np.floor((chunk - grid.origin) / grid.spacing).astype(np.int64)
        idx = base[:, None, :] + offsets[None, :, :]
        inside = np.all((idx >= 0) & (idx < shape), axis=-1)
        node_pos = grid.origin + grid.spacing * idx
        dist2 = np.sum((node_pos - chunk[:, None, :]) ** 2, axis=-1)
        hit = inside & (dist2 <= epsilon ** 2)
        rows, cols = np.nonzero(hit)
        flat = np.ravel_multi_index(tuple(idx[rows, cols].T), grid.shape)
        yield rows + start, flat


def ball_epistemic_value(cloud, transform, epsilon, y_nodes=None, return_std=False):
    """Ball-kernel epistemic value of the cloud mapped through ``transform``.

    ``y_nodes`` defaults to :meth:`NodeGrid.covering` of the mapped cloud.
    The standard error (``return_std=True``) is the delta-method error of the
    functional of the ball frequencies.  Ball counting is exact and costs
    O(n * (2 eps / spacing)^d).

    Raises
    ------
    InsufficientCoverage
        If more than 1% of the mapped cloud lies outside the node grid.
    """
    epsilon = check_positive(epsilon, "epsilon")
    mapped = transform(cloud.points) if transform is not None else cloud.points
    grid = y_nodes if y_nodes is not None else NodeGrid.covering(mapped, epsilon)
    outside = np.any((mapped < grid.origin) | (mapped > grid.upper), axis=1)
    if outside.mean() > COVERAGE_LOSS:
        raise InsufficientCoverage(f"{outside.mean():.2%} of the cloud is outside the node grid")

    n = cloud.n
    counts = np.zeros(grid.size)
    pairs = list(_ball_incidence(mapped, grid, epsilon))
    for _, flat in pairs:
        counts += np.bincount(flat, minlength=grid.size)
    q = counts / n
    scale = grid.cell_volume / ball_volume(epsilon, grid.dim)
    pos = q > 0
    value = -scale * float(np.sum(q[pos] * np.log(q[pos])))
    if not return_std:
        return value

    deriv = np.zeros(grid.size)
    deriv[pos] = -scale * (np.log(q[pos]) + 1.0)
    influence = np.zeros(n)
    for rows, flat in pairs:
        influence += np.bincount(rows, weights=deriv[flat], minlength=n)
    return value, float(influence.std(ddof=1) / math.sqrt(n))


def epsilon_precondition(cloud, epsilon, transform=None):
    """``(ratio, ok)`` for the requirement eps < 0.5 * min marginal std."""
    pts = transform(cloud.points) if transform is not None else cloud.points
    min_std = float(pts.std(axis=0).min())
    ratio = math.inf if min_std == 0 else epsilon / min_std
    return ratio, ratio < 0.5


def mc_joint_mutual_information(mean, cov, split, n, seed=None):
    """Monte Carlo I(A; B) for a joint Gaussian over ``(a, b)`` split at ``split``.

    Returns
    -------
    estimate, std_error : float
    """
    rng = check_random_state(seed)
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    samples = rng.multivariate_normal(mean, cov, size=n, method="cholesky")
    a, b = samples[:, :split], samples[:, split:]
    log_joint = multivariate_normal(mean, cov).logpdf(samples)
    log_a = multivariate_normal(mean[:split], cov[:split, :split]).logpdf(a)
    log_b = multivariate_normal(mean[split:], cov[split:, split:]).logpdf(b)
    terms = np.atleast_1d(log_joint - log_a - log_b)
    return float(terms.mean()), float(terms.std(ddof=1) / math.sqrt(n))


def mc_mutual_information(belief, sensor, n=100_000, seed=None):
    """Monte Carlo estimate of the epistemic value of ``belief`` under ``sensor``."""
    if n < 100_000:
        raise ValueError("n must be >= 1e5")
    mean, cov = joint_moments(belief, sensor)
    return mc_joint_mutual_information(mean, cov, belief.dim, n, seed)


def jacobian_preference_check(frames, obj, gamma=1.0):
    """Jacobian magnitude of each frame's transition map at the object's image.

    Transition maps are taken from ``frames[0]``; the result differs from the
    pure depth-contraction Jacobian at each frame by one common factor.

    Returns
    -------
    list of (Frame, float)
    """
    if not frames:
        return []
    kind = GeometryKind.projective(gamma)
    obj = np.asarray(obj, dtype=float)
    for f in frames:
        local = frame_map(f)(obj)
        if np.any(np.abs(local[:-1]) > 1e-9) or local[-1] <= 0:
            raise ValueError("every frame must face the object")
    ref = frames[0]
    y_obj = rho(frame_map(ref)(obj), gamma)
    return [(f, abs(transition_map(ref, f, kind).jacobian_det(y_obj))) for f in frames]
