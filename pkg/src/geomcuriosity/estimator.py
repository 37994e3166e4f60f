"""scikit-learn style front end to the exploration agent."""

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .agent import (IDLE, TRANSLATE, ExplorationConfig, Move, ScoredMove, initial_state,
                    run_exploration, score_moves, select_move)
from .geometry import GeometryKind
from .pushforward import IntegrationConfig


class CuriousExplorer(BaseEstimator):
    """Curiosity-driven explorer with a Euclidean or projective world model.

    Parameters
    ----------
    geometry : {"projective", "euclidean"}
    gamma : float
        Depth-contraction parameter of the projective embedding.
    epsilon : float
        Sensor noise standard deviation in internal-model units.
    sigma0 : float
        Initial belief standard deviation.
    step_norm : float
        Length of each translation, in world units.
    idle_band : float
        Translations must beat the idle value by more than this.
    min_distance : float
        Approach halts before entering this radius around the object.
    n_iterations : int
    integration : {"montecarlo", "grid"}
    sample_count, nodes_per_axis : int
        Resolution of the projective pushforward.
    start : array-like or None
        Agent start position; the origin when None.
    random_state : int

    Attributes
    ----------
    trajectories_ : list of Trajectory
        One exploration run per row of the ``X`` given to :meth:`fit`.
    paths_ : list of ndarray
        Agent positions of each run, start included.

    Examples
    --------
    >>> est = CuriousExplorer(geometry="euclidean", n_iterations=3)
    >>> est.fit([[0.0, 2.0]]).paths_[0][-1].tolist()
    [0.0, 0.0]
    """

    def __init__(self, geometry="projective", gamma=1.0, epsilon=0.1, sigma0=0.5,
                 step_norm=0.1, idle_band=1e-4, min_distance=0.2, n_iterations=20,
                 integration="montecarlo", sample_count=20_000, nodes_per_axis=41,
                 start=None, random_state=0, raw_frame_observation=False,
                 observation_noise=False):
        self.geometry = geometry
        self.gamma = gamma
        self.epsilon = epsilon
        self.sigma0 = sigma0
        self.step_norm = step_norm
        self.idle_band = idle_band
        self.min_distance = min_distance
        self.n_iterations = n_iterations
        self.integration = integration
        self.sample_count = sample_count
        self.nodes_per_axis = nodes_per_axis
        self.start = start
        self.random_state = random_state
        self.raw_frame_observation = raw_frame_observation
        self.observation_noise = observation_noise

    def _config(self, obj, seed, iterations=None):
        start = np.zeros(obj.shape[0]) if self.start is None else np.asarray(self.start, float)
        return ExplorationConfig(
            start=start,
            object=obj,
            iterations=self.n_iterations if iterations is None else iterations,
            geometry=GeometryKind(self.geometry, self.gamma),
            step_norm=self.step_norm,
            epsilon=self.epsilon,
            sigma0=self.sigma0,
            idle_band=self.idle_band,
            min_distance=self.min_distance,
            integration=IntegrationConfig(self.integration, self.sample_count,
                                          self.nodes_per_axis),
            seed=seed,
            observation_noise=self.observation_noise,
            raw_frame_observation=self.raw_frame_observation,
        )

    def _objects(self, X):
        X = check_points(X, name="X")
        return X[None, :] if X.ndim == 1 else X

    def fit(self, X, y=None):
        """Run one exploration per object position in ``X`` (shape (n, d))."""
        X = self._objects(X)
        self.trajectories_ = [run_exploration(self._config(obj, self.random_state))
                              for obj in X]
        self.paths_ = [t.positions for t in self.trajectories_]
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        """First-step epistemic values, shape (n, 9): idle then directions 0..7.

        Independent of any fitted state.  Row ``i`` is scored with seed
        ``(random_state, i)``.
        """
        X = self._objects(X)
        out = np.empty((X.shape[0], 9))
        for i, obj in enumerate(X):
            cfg = self._config(obj, self.random_state, iterations=0)
            state = initial_state(cfg)
            integ = cfg.integration.with_seed(
                int(np.random.SeedSequence([self.random_state, i]).generate_state(1)[0]))
            scored = score_moves(state, cfg.object, cfg.geometry, cfg.sensor, integ,
                                 cfg.step_norm, cfg.min_distance)
            out[i] = [s.epistemic_value for s in scored]
        return out

    def predict(self, X):
        """First move chosen for each object position: -1 for idle, else 0..7."""
        scores = self.decision_function(X)
        return np.array([_choice_from_scores(row, self.idle_band, self.step_norm)
                         for row in scores])

    def final_distances(self):
        check_is_fitted(self, "trajectories_")
        return np.array([np.linalg.norm(t.final_state.position - np.asarray(t.config["object"]))
                         for t in self.trajectories_])


def _choice_from_scores(row, idle_band, step_norm):
    scored = [ScoredMove(Move(IDLE), row[0])]
    for k in range(8):
        err = None if np.isfinite(row[k + 1]) else "excluded"
        scored.append(ScoredMove(Move(TRANSLATE, 2 * math.pi * k / 8, step_norm, k),
                                 row[k + 1], error=err))
    return select_move(scored, idle_band).index
