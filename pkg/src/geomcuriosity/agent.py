"""One-step-ahead curiosity-driven exploration.

Each iteration scores the idle move and eight translations by the epistemic
value of the belief pushed through the induced change of internal
coordinates, executes the best move (idle unless a translation beats it by
more than ``idle_band``), observes the object and conditions on it.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from ._validation import check_dim, check_point, check_positive
from .belief import GaussianBelief, SensorModel, condition, epistemic_value
from .exceptions import DegenerateDirection, NumericalError
from .geometry import (SINGULAR_TOL, Frame, GeometryKind, face_object_frame, frame_map,
                       rho, transition_map)
from .pushforward import IntegrationConfig, pushforward

logger = logging.getLogger(__name__)

IDLE = "idle"
TRANSLATE = "translate"
N_DIRECTIONS = 8
DISTANCE_SLACK = 1e-9


@dataclass(frozen=True)
class Move:
    kind: str
    direction_angle: float = 0.0
    step_norm: float = 0.0
    index: int = -1

    def __post_init__(self):
        if self.kind == TRANSLATE:
            if not 0.0 <= self.direction_angle < 2 * math.pi:
                raise ValueError("direction_angle must lie in [0, 2*pi)")
            check_positive(self.step_norm, "step_norm")
        elif self.kind != IDLE:
            raise ValueError(f"unknown move kind {self.kind!r}")

    @property
    def is_idle(self):
        return self.kind == IDLE

    @property
    def label(self):
        return IDLE if self.is_idle else str(self.index)

    @classmethod
    def idle(cls):
        return cls(IDLE)


@dataclass(frozen=True, eq=False)
class AgentState:
    frame: Frame
    belief: GaussianBelief
    step_index: int = 0

    @property
    def position(self):
        return self.frame.origin


@dataclass(frozen=True, eq=False)
class ScoredMove:
    """A candidate move with the value of its pushed-forward belief.

    Moves that could not be scored carry ``-inf`` and the reason in ``error``.
    """

    move: Move
    epistemic_value: float
    pushed_belief: Optional[GaussianBelief] = None
    frame: Optional[Frame] = None
    error: Optional[str] = None

    @property
    def excluded(self):
        return self.error is not None


@dataclass(frozen=True, eq=False)
class StepRecord:
    state: AgentState
    scored: List[ScoredMove]
    chosen: Move
    observation: np.ndarray
    next_state: AgentState


@dataclass(eq=False)
class ExplorationConfig:
    """Parameters of one exploration run.

    ``start`` and ``object`` are world points of the same dimension (2 or 3);
    translations stay in the floor plane spanned by the first two axes.
    """

    start: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0]))
    object: np.ndarray = field(default_factory=lambda: np.array([0.0, 2.0]))
    iterations: int = 20
    geometry: GeometryKind = field(default_factory=GeometryKind)
    step_norm: float = 0.1
    epsilon: float = 0.1
    sigma0: float = 0.5
    idle_band: float = 1e-4
    min_distance: float = 0.2
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    seed: int = 0
    observation_noise: bool = False
    raw_frame_observation: bool = False

    def __post_init__(self):
        self.start = check_point(self.start, name="start")
        check_dim(self.start.shape[0])
        self.object = check_point(self.object, dim=self.start.shape[0], name="object")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        for name in ("step_norm", "epsilon", "sigma0", "idle_band"):
            check_positive(getattr(self, name), name)
        check_positive(self.min_distance, "min_distance", strict=False)

    @property
    def dim(self):
        return self.start.shape[0]

    @property
    def sensor(self):
        return SensorModel(self.epsilon)

    def snapshot(self):
        """JSON-ready dictionary of every parameter."""
        return {
            "start": self.start.tolist(),
            "object": self.object.tolist(),
            "iterations": self.iterations,
            "geometry": self.geometry.tag,
            "gamma": self.geometry.gamma,
            "dim": self.dim,
            "step_norm": self.step_norm,
            "epsilon": self.epsilon,
            "sigma0": self.sigma0,
            "idle_band": self.idle_band,
            "min_distance": self.min_distance,
            "integration": asdict(self.integration),
            "seed": self.seed,
            "observation_noise": self.observation_noise,
            "raw_frame_observation": self.raw_frame_observation,
        }


@dataclass(eq=False)
class Trajectory:
    initial_state: AgentState
    steps: List[StepRecord]
    config: dict
    halted: Optional[str] = None

    @property
    def positions(self):
        """(n_steps + 1, d) array of agent positions, initial one first."""
        rows = [self.initial_state.position]
        rows += [s.next_state.position for s in self.steps]
        return np.array(rows)

    @property
    def final_state(self):
        return self.steps[-1].next_state if self.steps else self.initial_state


class ExplorationAborted(NumericalError):
    """Unrecoverable error mid-run; ``trajectory`` holds the steps completed."""

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def _floor_rotate(vec, angle):
    out = vec.copy()
    c, s = math.cos(angle), math.sin(angle)
    x, y = vec[0], vec[1]
    out[0] = c * x - s * y
    out[1] = s * x + c * y
    return out


def _object_heading(position, obj):
    delta = np.asarray(obj, dtype=float) - np.asarray(position, dtype=float)
    delta[2:] = 0.0
    norm = np.linalg.norm(delta)
    if norm <= SINGULAR_TOL:
        raise DegenerateDirection("object has no floor-plane direction from the agent")
    return delta / norm


def enumerate_moves(state, obj, step_norm):
    """Idle followed by eight translations at angles ``2*pi*k/8``.

    Angle 0 points at the object; angles grow counterclockwise in the floor
    plane.
    """
    _object_heading(state.position, obj)
    step_norm = check_positive(step_norm, "step_norm")
    moves = [Move.idle()]
    for k in range(N_DIRECTIONS):
        moves.append(Move(TRANSLATE, 2 * math.pi * k / N_DIRECTIONS, step_norm, k))
    return moves


def candidate_position(position, obj, move):
    position = np.asarray(position, dtype=float)
    if move.is_idle:
        return position.copy()
    heading = _object_heading(position, obj)
    return position + move.step_norm * _floor_rotate(heading, move.direction_angle)


def score_move(state, move, obj, kind, sensor, cfg=None):
    """Epistemic value of ``move`` from ``state``.

    Errors propagate; :func:`score_moves` turns them into exclusions.
    """
    new_pos = candidate_position(state.position, obj, move)
    new_frame = face_object_frame(new_pos, obj)
    psi = transition_map(state.frame, new_frame, kind)
    pushed = pushforward(state.belief, psi, cfg)
    return ScoredMove(move, float(epistemic_value(pushed, sensor)), pushed, new_frame)


def score_moves(state, obj, kind, sensor, cfg=None, step_norm=0.1, min_distance=0.0):
    """Score the whole move set; failures and blocked moves score ``-inf``."""
    out = []
    for move in enumerate_moves(state, obj, step_norm):
        new_pos = candidate_position(state.position, obj, move)
        if not move.is_idle and np.linalg.norm(obj - new_pos) < min_distance - DISTANCE_SLACK:
            out.append(ScoredMove(move, -math.inf, error="within minimum distance of object"))
            continue
        try:
            out.append(score_move(state, move, obj, kind, sensor, cfg))
        except (NumericalError, np.linalg.LinAlgError) as exc:
            logger.debug("move %s excluded: %s", move.label, exc)
            out.append(ScoredMove(move, -math.inf, error=f"{type(exc).__name__}: {exc}"))
    return out


def select_move(scored, idle_band=1e-4):
    """Idle unless some translation beats idle by more than ``idle_band``.

    Ties among translations go to the smaller angle, then to list order.
    """
    if not scored:
        raise ValueError("no scored moves")
    idle = [s for s in scored if s.move.is_idle]
    if not idle:
        raise ValueError("move set must contain the idle move")
    idle_value = idle[0].epistemic_value
    translations = [s for s in scored if not s.move.is_idle and not s.excluded]
    if not translations:
        return idle[0].move
    best_value = max(s.epistemic_value for s in translations)
    if best_value <= idle_value + idle_band:
        return idle[0].move
    best = [s for s in translations if s.epistemic_value == best_value]
    best.sort(key=lambda s: s.move.direction_angle)
    return best[0].move


def observe(frame, obj, kind, noise=None, rng=None, raw_frame_observation=False):
    """Internal-model representation of the object seen from ``frame``."""
    y = frame_map(frame)(obj)
    if kind.is_projective and not raw_frame_observation:
        y = rho(y, kind.gamma)
    if noise is not None:
        rng = rng if rng is not None else np.random.default_rng()
        y = y + noise.epsilon * rng.standard_normal(y.shape)
    return y


def initial_state(config):
    frame = face_object_frame(config.start, config.object)
    mean = observe(frame, config.object, config.geometry,
                   raw_frame_observation=config.raw_frame_observation)
    return AgentState(frame, GaussianBelief.isotropic(mean, config.sigma0), 0)


def _approach_blocked(position, obj, config):
    return np.linalg.norm(obj - position) - config.step_norm < config.min_distance - DISTANCE_SLACK


def run_exploration(config):
    """Run the exploration loop for ``config.iterations`` steps.

    The run stops early once an approach step would enter the
    ``min_distance`` disc around the object.

    Raises
    ------
    ExplorationAborted
        On the first unrecoverable numerical error, carrying the partial
        trajectory.
    """
    kind = config.geometry
    sensor = config.sensor
    obj = config.object
    noise = sensor if config.observation_noise else None
    state = initial_state(config)
    traj = Trajectory(state, [], config.snapshot())
    for t in range(config.iterations):
        if config.min_distance > 0 and _approach_blocked(state.position, obj, config):
            traj.halted = "min_distance"
            break
        cfg = config.integration.with_seed(_step_seed(config.seed, t))
        try:
            scored = score_moves(state, obj, kind, sensor, cfg, config.step_norm,
                                 config.min_distance)
            if all(s.excluded for s in scored):
                raise NumericalError("every candidate move failed to score")
            chosen = select_move(scored, config.idle_band)
            picked = next(s for s in scored if s.move == chosen)
            if picked.excluded:
                raise NumericalError(f"selected move failed: {picked.error}")
            rng = np.random.default_rng([config.seed, t, 1])
            y = observe(picked.frame, obj, kind, noise, rng, config.raw_frame_observation)
            posterior = condition(picked.pushed_belief, sensor, y)
        except NumericalError as exc:
            traj.halted = f"aborted: {exc}"
            raise ExplorationAborted(str(exc), traj) from exc
        next_state = AgentState(picked.frame, posterior, t + 1)
        traj.steps.append(StepRecord(state, scored, chosen, y, next_state))
        state = next_state
    return traj


def _step_seed(seed, step):
    # common random numbers: all moves of one step share a seed
    return int(np.random.SeedSequence([seed, step]).generate_state(1)[0])
