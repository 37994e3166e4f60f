"""Gaussian beliefs, Gaussian sensor conditioning and epistemic value."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._validation import check_point, check_positive, check_spd
from .exceptions import NotPositiveDefinite

GAUSSIAN_ISOTROPIC = "gaussian"
UNIFORM_BALL = "ball"


@dataclass(frozen=True, eq=False)
class GaussianBelief:
    """Normal belief ``N(mean, cov)`` over internal-model coordinates."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = check_point(self.mean, name="mean").copy()
        cov = check_spd(self.cov, dim=mean.shape[0]).copy()
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.shape[0]

    @classmethod
    def isotropic(cls, mean, sigma):
        mean = check_point(mean, name="mean")
        sigma = check_positive(sigma, "sigma")
        return cls(mean, sigma ** 2 * np.eye(mean.shape[0]))

    def sample(self, n, rng):
        """Draw ``n`` points using the Cholesky factor of ``cov``."""
        chol = np.linalg.cholesky(self.cov)
        z = rng.standard_normal((n, self.dim))
        return self.mean + z @ chol.T


@dataclass(frozen=True)
class SensorModel:
    """Observation noise ``P(Y | X)``.

    ``kind="gaussian"`` is ``N(x, epsilon**2 I)``; ``kind="ball"`` is the
    uniform density on the ``epsilon``-ball around ``x``, used only by the
    oracle.
    """

    epsilon: float = 0.1
    kind: str = GAUSSIAN_ISOTROPIC

    def __post_init__(self):
        if self.kind not in (GAUSSIAN_ISOTROPIC, UNIFORM_BALL):
            raise ValueError(f"unknown sensor kind {self.kind!r}")
        object.__setattr__(self, "epsilon", check_positive(self.epsilon, "epsilon"))

    def noise_cov(self, dim):
        return self.epsilon ** 2 * np.eye(dim)


def _require_gaussian(sensor):
    if sensor.kind != GAUSSIAN_ISOTROPIC:
        raise ValueError("closed-form operations need a Gaussian sensor")


def condition(belief, sensor, obs):
    """Posterior belief after observing ``obs`` through ``sensor``.

    Raises
    ------
    NotPositiveDefinite
        If the posterior covariance breaks down numerically.
    """
    _require_gaussian(sensor)
    obs = check_point(obs, dim=belief.dim, name="observation")
    sigma = belief.cov
    factor = cho_factor(sigma + sensor.noise_cov(belief.dim))
    gain = cho_solve(factor, sigma).T  # Σ (Σ + ε²I)⁻¹, using symmetry of both
    mean = belief.mean + gain @ (obs - belief.mean)
    cov = sigma - gain @ sigma
    cov = 0.5 * (cov + cov.T)
    try:
        return GaussianBelief(mean, cov)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(f"posterior covariance broke down: {exc}") from exc


def joint_moments(belief, sensor):
    """Mean and covariance of the joint Gaussian of ``(X, Y)``."""
    _require_gaussian(sensor)
    d = belief.dim
    s = belief.cov
    mean = np.concatenate([belief.mean, belief.mean])
    cov = np.block([[s, s], [s, s + sensor.noise_cov(d)]])
    return mean, cov


def _logdet_spd(mat):
    chol = np.linalg.cholesky(mat)
    return 2.0 * np.sum(np.log(np.diag(chol)))


def epistemic_value(belief, sensor):
    """Mutual information ``I(X; Y)`` between state and observation.

    Uses ``det(joint) = det(Σ) det(ε²I)`` so the value reduces to
    ``0.5 * logdet(I + Σ / ε²)``, which is non-negative by construction.
    """
    _require_gaussian(sensor)
    scaled = np.eye(belief.dim) + belief.cov / sensor.epsilon ** 2
    return 0.5 * _logdet_spd(scaled)


def epistemic_value_det_ratio(belief, sensor):
    """Same quantity from the three determinants of the joint covariance.

    Less stable than :func:`epistemic_value`; kept as an algebraic cross-check.
    """
    d = belief.dim
    _, joint = joint_moments(belief, sensor)
    return 0.5 * (_logdet_spd(joint[:d, :d]) + _logdet_spd(joint[d:, d:]) - _logdet_spd(joint))
