"""Curiosity-driven exploration with group-structured internal world models.

An agent keeps a Gaussian belief about an object's position in an internal
coordinate space.  Each candidate move transforms that space, either by a
rigid change of frame (Euclidean model) or by a projective map (projective
model), and the agent picks the move whose transformed belief promises the
largest expected information gain.
"""

from .agent import (ExplorationAborted, ExplorationConfig, Move, Trajectory, enumerate_moves,
                    run_exploration, score_moves, select_move)
from .belief import GaussianBelief, SensorModel, condition, epistemic_value
from .estimator import CuriousExplorer
from .exceptions import (ConfigError, DegenerateCovariance, DegenerateDirection,
                         GeomCuriosityError, InsufficientCoverage, NotPositiveDefinite,
                         NumericalError, SingularMass, SingularPlane)
from .geometry import (AffineMap, Frame, GeometryKind, HomTransform, embedding,
                       face_object_frame, frame_map, rho, rho_inverse, transition_map)
from .pushforward import IntegrationConfig, pushforward

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "ConfigError", "CuriousExplorer", "DegenerateCovariance",
    "DegenerateDirection", "ExplorationAborted", "ExplorationConfig", "Frame",
    "GaussianBelief", "GeomCuriosityError", "GeometryKind", "HomTransform",
    "InsufficientCoverage", "IntegrationConfig", "Move", "NotPositiveDefinite",
    "NumericalError", "SensorModel", "SingularMass", "SingularPlane", "Trajectory",
    "condition", "embedding", "enumerate_moves", "epistemic_value", "face_object_frame",
    "frame_map", "pushforward", "rho", "rho_inverse", "run_exploration", "score_moves",
    "select_move", "transition_map",
]
