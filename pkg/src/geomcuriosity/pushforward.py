"""Transport of Gaussian beliefs through internal-model transforms.

Affine maps push a Gaussian forward exactly.  Projective maps do not, so the
image is replaced by the Gaussian with the same first two moments.  The
moments are integrated over the domain: points are drawn from (or placed on a
quadrature grid under) the prior and mapped forward, which is the change of
variables of the codomain integrals read backwards and needs no Jacobian.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .belief import GaussianBelief
from .exceptions import DegenerateCovariance, NotPositiveDefinite, SingularMass
from .geometry import SINGULAR_TOL, AffineMap, HomTransform

MONTE_CARLO = "montecarlo"
GRID = "grid"

HORIZON_BAND = 1e-3
HORIZON_MASS = 1e-6
MAX_REJECT_FRACTION = 1e-3
COV_JITTER = 1e-12


@dataclass(frozen=True)
class IntegrationConfig:
    """How the projective pushforward moments are integrated.

    Attributes
    ----------
    scheme : {"montecarlo", "grid"}
    sample_count : int
        Number of prior draws for Monte Carlo.
    nodes_per_axis : int
        Tensor-grid resolution for grid quadrature.
    half_width_sigmas : float
        Grid half-width in standard deviations along each principal axis.
    seed : int
        Seed of the per-call generator.
    """

    scheme: str = MONTE_CARLO
    sample_count: int = 20_000
    nodes_per_axis: int = 41
    half_width_sigmas: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in (MONTE_CARLO, GRID):
            raise ValueError(f"unknown integration scheme {self.scheme!r}")
        if self.scheme == MONTE_CARLO and self.sample_count < 1000:
            raise ValueError("sample_count must be >= 1000")
        if self.scheme == GRID and self.nodes_per_axis < 9:
            raise ValueError("nodes_per_axis must be >= 9")
        if self.half_width_sigmas <= 0:
            raise ValueError("half_width_sigmas must be > 0")

    def with_seed(self, seed):
        return IntegrationConfig(self.scheme, self.sample_count, self.nodes_per_axis,
                                 self.half_width_sigmas, seed)


def pushforward_affine(belief, amap):
    """Exact image ``N(A mu + b, A Sigma A^T)``."""
    lin = amap.linear
    cov = lin @ belief.cov @ lin.T
    return GaussianBelief(amap(belief.mean), 0.5 * (cov + cov.T))


def horizon_mass(belief, hmap, band=HORIZON_BAND):
    """Prior probability that a point lands within ``band`` of, or beyond, the horizon.

    The homogeneous weight ``w = c.x + e`` is Gaussian under the belief, so
    the probability is exact.  "Beyond" means on the opposite side of the
    horizon from the belief mean.
    """
    d = hmap.dim
    c = hmap.matrix[d, :d]
    e = hmap.matrix[d, d]
    m = float(c @ belief.mean + e)
    s = float(np.sqrt(c @ belief.cov @ c))
    if s == 0.0:
        return 0.0 if abs(m) > band else 1.0
    return float(ndtr((band - abs(m)) / s))


def _grid_nodes(belief, cfg):
    d = belief.dim
    ticks = np.linspace(-cfg.half_width_sigmas, cfg.half_width_sigmas, cfg.nodes_per_axis)
    mesh = np.stack(np.meshgrid(*([ticks] * d), indexing="ij"), axis=-1).reshape(-1, d)
    logw = -0.5 * np.sum(mesh ** 2, axis=1)
    weights = np.exp(logw - logw.max())
    weights /= weights.sum()
    vals, vecs = np.linalg.eigh(belief.cov)
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    return belief.mean + mesh @ root.T, weights


def _mc_mapped(belief, hmap, cfg):
    rng = np.random.default_rng(cfg.seed)
    n = cfg.sample_count
    points = belief.sample(n, rng)
    num, w = hmap.homogeneous_action(points)
    bad = np.abs(w) <= SINGULAR_TOL
    rejected = 0
    while np.any(bad):
        rejected += int(bad.sum())
        if rejected > MAX_REJECT_FRACTION * n:
            raise SingularMass(f"{rejected} of {n} draws hit the horizon")
        fresh = belief.sample(int(bad.sum()), rng)
        num[bad], w[bad] = hmap.homogeneous_action(fresh)
        bad = np.abs(w) <= SINGULAR_TOL
    return num / w[:, None], None, rejected


def _moments(points, weights):
    if weights is None:
        mean = points.mean(axis=0)
        centered = points - mean
        cov = centered.T @ centered / (points.shape[0] - 1)
    else:
        mean = weights @ points
        centered = points - mean
        cov = (centered * weights[:, None]).T @ centered
    return mean, 0.5 * (cov + cov.T)


def pushforward_samples(belief, hmap, cfg):
    """Mapped integration points and their weights (``None`` for equal weights).

    Returns
    -------
    mapped : (n, d) ndarray
    weights : (n,) ndarray or None
    rejected : int
        Monte Carlo draws resampled because they hit the horizon.
    """
    if horizon_mass(belief, hmap) >= HORIZON_MASS:
        raise SingularMass("belief has non-negligible mass near the transform horizon")
    if cfg.scheme == MONTE_CARLO:
        return _mc_mapped(belief, hmap, cfg)
    nodes, weights = _grid_nodes(belief, cfg)
    num, w = hmap.homogeneous_action(nodes)
    keep = np.abs(w) > SINGULAR_TOL
    weights = np.where(keep, weights, 0.0)
    weights /= weights.sum()
    w = np.where(keep, w, 1.0)
    return num / w[:, None], weights, int((~keep).sum())


def pushforward_projective(belief, hmap, cfg=None):
    """Moment-matched Gaussian image of ``belief`` under a projective map.

    Raises
    ------
    SingularMass
        If the belief puts mass near the horizon of ``hmap``.
    DegenerateCovariance
        If the matched covariance is not positive definite.
    """
    cfg = cfg or IntegrationConfig()
    if isinstance(hmap, AffineMap):
        hmap = hmap.to_homogeneous()
    if not isinstance(hmap, HomTransform):
        raise TypeError("pushforward_projective needs a HomTransform")
    mapped, weights, _ = pushforward_samples(belief, hmap, cfg)
    mean, cov = _moments(mapped, weights)
    cov = cov + COV_JITTER * np.eye(belief.dim)
    try:
        return GaussianBelief(mean, cov)
    except NotPositiveDefinite as exc:
        raise DegenerateCovariance(str(exc)) from exc


def pushforward(belief, transform, cfg=None):
    """Dispatch on the transform type."""
    if isinstance(transform, AffineMap):
        return pushforward_affine(belief, transform)
    return pushforward_projective(belief, transform, cfg)
