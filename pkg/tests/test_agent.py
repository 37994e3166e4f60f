import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomcuriosity.agent import (IDLE, TRANSLATE, AgentState, ExplorationAborted,
                                 ExplorationConfig, Move, ScoredMove, candidate_position,
                                 enumerate_moves, initial_state, observe, run_exploration,
                                 score_move, score_moves, select_move)
from geomcuriosity.belief import GaussianBelief, SensorModel, epistemic_value
from geomcuriosity.exceptions import DegenerateDirection, NumericalError
from geomcuriosity.experiments.checks import random_spd
from geomcuriosity.geometry import GeometryKind, face_object_frame, frame_map, rho
from geomcuriosity.pushforward import IntegrationConfig

EUCL = GeometryKind.euclidean()
PROJ = GeometryKind.projective(1.0)
OBJ = np.array([0.0, 2.0])


def _state(pos=(0.0, 0.0), obj=OBJ, kind=PROJ, sigma=0.05):
    frame = face_object_frame(pos, obj)
    return AgentState(frame, GaussianBelief.isotropic(observe(frame, obj, kind), sigma))


def _scored(values):
    moves = enumerate_moves(_state(), OBJ, 0.1)
    return [ScoredMove(m, v) for m, v in zip(moves, values)]


# --- moves ---------------------------------------------------------------------

def test_move_validation():
    with pytest.raises(ValueError):
        Move(TRANSLATE, 2 * math.pi, 0.1)
    with pytest.raises(ValueError):
        Move(TRANSLATE, 0.0, 0.0)
    with pytest.raises(ValueError):
        Move("rotate")
    assert Move.idle().label == IDLE


def test_enumerate_moves():
    moves = enumerate_moves(_state(), OBJ, 0.1)
    assert len(moves) == 9
    assert moves[0].is_idle
    angles = [m.direction_angle for m in moves[1:]]
    assert angles == sorted(angles)
    assert np.allclose(angles, 2 * np.pi * np.arange(8) / 8)


def test_enumerate_moves_degenerate():
    state = _state()
    with pytest.raises(DegenerateDirection):
        enumerate_moves(state, state.position, 0.1)


def test_candidate_positions():
    moves = enumerate_moves(_state(), OBJ, 0.1)
    assert np.allclose(candidate_position([0, 0], OBJ, moves[1]), [0.0, 0.1], atol=1e-15)
    assert np.allclose(candidate_position([0, 0], OBJ, moves[5]), [0.0, -0.1], atol=1e-15)
    # counterclockwise: a quarter turn left of "towards (0, 2)" is -x
    assert np.allclose(candidate_position([0, 0], OBJ, moves[3]), [-0.1, 0.0], atol=1e-15)
    assert np.array_equal(candidate_position([0, 0], OBJ, moves[0]), [0.0, 0.0])


def test_candidate_position_3d_stays_in_floor_plane():
    obj = np.array([1.0, 1.0, 2.0])
    move = Move(TRANSLATE, math.pi / 4, 0.3, 1)
    new = candidate_position(np.zeros(3), obj, move)
    assert new[2] == 0.0 and math.isclose(np.linalg.norm(new), 0.3)


# --- scoring -------------------------------------------------------------------

def test_idle_score_euclidean_equals_belief_value():
    state = _state(kind=EUCL, sigma=0.3)
    sensor = SensorModel(0.1)
    s = score_move(state, Move.idle(), OBJ, EUCL, sensor)
    assert math.isclose(s.epistemic_value, epistemic_value(state.belief, sensor), rel_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3]))
def test_euclidean_moves_all_equal_idle(seed, dim):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-3, 3, dim)
    obj = pos + np.append(rng.uniform(0.5, 3, 2) * rng.choice([-1, 1], 2), rng.normal(size=dim - 2))
    state = AgentState(face_object_frame(pos, obj),
                       GaussianBelief(rng.normal(size=dim), random_spd(rng, dim, 0.5)))
    scored = score_moves(state, obj, EUCL, SensorModel(rng.uniform(0.05, 1.0)),
                         step_norm=rng.uniform(0.05, 0.3))
    vals = np.array([s.epistemic_value for s in scored])
    assert np.max(np.abs(vals - vals[0])) < 1e-6
    assert select_move(scored).is_idle


def test_projective_approach_beats_retreat():
    scored = score_moves(_state(), OBJ, PROJ, SensorModel(0.05), IntegrationConfig(seed=1))
    vals = [s.epistemic_value for s in scored]
    assert vals[1] > vals[5]
    assert vals[1] == max(vals[1:])


@pytest.mark.parametrize("dist", [0.5, 1.0, 2.5, 5.0])
def test_projective_approach_over_distances(dist):
    obj = np.array([0.0, dist])
    scored = score_moves(_state(obj=obj, sigma=0.01), obj, PROJ, SensorModel(0.05),
                         IntegrationConfig(seed=2))
    best = max(scored[1:], key=lambda s: s.epistemic_value)
    assert best.move.index == 0


def test_min_distance_exclusion():
    obj = np.array([0.0, 0.25])
    scored = score_moves(_state(obj=obj, kind=EUCL), obj, EUCL, SensorModel(0.1),
                         step_norm=0.1, min_distance=0.2)
    assert scored[1].excluded and scored[1].epistemic_value == -math.inf
    assert not scored[5].excluded


def test_scoring_failure_is_excluded():
    # the approach transform from the origin has its horizon at internal depth -9
    frame = face_object_frame([0.0, 0.0], OBJ)
    state = AgentState(frame, GaussianBelief([0.0, -9.0], 0.01 * np.eye(2)))
    scored = score_moves(state, OBJ, PROJ, SensorModel(0.1))
    assert not scored[0].excluded
    assert scored[1].excluded and "SingularMass" in scored[1].error
    assert select_move(scored).index != 0


# --- selection ------------------------------------------------------------------

def test_select_all_equal_is_idle():
    assert select_move(_scored([1.0] * 9)).is_idle


def test_select_within_band_is_idle():
    assert select_move(_scored([1.0] + [1.0 + 5e-5] * 8)).is_idle


def test_select_clear_winner():
    vals = [1.0] * 9
    vals[3] = 1.0 + 1e-3
    assert select_move(_scored(vals)).index == 2


def test_select_tie_smaller_angle():
    vals = [1.0] * 9
    vals[7] = vals[2] = 2.0
    assert select_move(_scored(vals)).index == 1


def test_select_requires_idle():
    with pytest.raises(ValueError):
        select_move(_scored([1.0] * 9)[1:])
    with pytest.raises(ValueError):
        select_move([])


# --- observation ------------------------------------------------------------------

def test_observe_examples():
    frame = face_object_frame([0.0, 0.0], OBJ)
    assert np.allclose(observe(frame, OBJ, EUCL), [0.0, 2.0], atol=1e-15)
    assert np.allclose(observe(frame, OBJ, PROJ), [0.0, 2 / 3], atol=1e-15)
    assert np.allclose(observe(frame, OBJ, PROJ, raw_frame_observation=True), [0.0, 2.0])
    near = face_object_frame([0.0, 1.0], OBJ)
    assert math.isclose(observe(near, OBJ, PROJ)[1], 0.5)


def test_observe_noise_is_seeded():
    frame = face_object_frame([0.0, 0.0], OBJ)
    a = observe(frame, OBJ, EUCL, SensorModel(0.1), np.random.default_rng(1))
    b = observe(frame, OBJ, EUCL, SensorModel(0.1), np.random.default_rng(1))
    assert np.array_equal(a, b) and not np.allclose(a, [0.0, 2.0])


def test_initial_state_mean():
    cfg = ExplorationConfig(geometry=PROJ)
    s = initial_state(cfg)
    assert np.allclose(s.belief.mean, rho(frame_map(s.frame)(OBJ), 1.0))
    assert np.allclose(s.belief.cov, 0.25 * np.eye(2))


# --- runs ---------------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        ExplorationConfig(iterations=-1)
    with pytest.raises(ValueError):
        ExplorationConfig(epsilon=0.0)
    with pytest.raises(ValueError):
        ExplorationConfig(start=[0.0, 0.0, 0.0])


def test_euclidean_run_stays_idle():
    traj = run_exploration(ExplorationConfig(geometry=EUCL))
    assert len(traj.steps) == 20
    assert all(s.chosen.is_idle for s in traj.steps)
    assert np.array_equal(traj.final_state.position, [0.0, 0.0])


def test_projective_run_approaches():
    traj = run_exploration(ExplorationConfig(geometry=PROJ))
    dist = np.linalg.norm(traj.positions - OBJ, axis=1)
    assert np.all(np.diff(dist) < 0)
    assert traj.halted == "min_distance"
    assert dist[-1] == pytest.approx(0.2, abs=1e-9)
    assert all(s.chosen.index == 0 for s in traj.steps)


def test_posterior_covariance_never_grows():
    traj = run_exploration(ExplorationConfig(geometry=PROJ, iterations=5))
    for step in traj.steps:
        pushed = next(s for s in step.scored if s.move == step.chosen).pushed_belief
        diff = pushed.cov - step.next_state.belief.cov
        assert np.min(np.linalg.eigvalsh(diff)) > -1e-10


def test_zero_iterations():
    traj = run_exploration(ExplorationConfig(iterations=0))
    assert traj.steps == [] and traj.positions.shape == (1, 2)


def test_run_is_deterministic():
    cfg = dict(geometry=PROJ, iterations=4, observation_noise=True, seed=7)
    a = run_exploration(ExplorationConfig(**cfg))
    b = run_exploration(ExplorationConfig(**cfg))
    assert np.array_equal(a.positions, b.positions)
    assert [[s.epistemic_value for s in st_.scored] for st_ in a.steps] == \
           [[s.epistemic_value for s in st_.scored] for st_ in b.steps]


def test_run_3d_projective_approaches():
    cfg = ExplorationConfig(start=[0.0, 0.0, 0.0], object=[0.0, 2.0, 0.5], geometry=PROJ,
                            iterations=5)
    dist = np.linalg.norm(run_exploration(cfg).positions - cfg.object, axis=1)
    assert np.all(np.diff(dist) < 0)


def test_abort_carries_partial_trajectory(monkeypatch):
    import geomcuriosity.agent as agent_mod

    calls = {"n": 0}
    real = agent_mod.condition

    def flaky(*args):
        calls["n"] += 1
        if calls["n"] == 3:
            raise NumericalError("boom")
        return real(*args)

    monkeypatch.setattr(agent_mod, "condition", flaky)
    with pytest.raises(ExplorationAborted) as info:
        run_exploration(ExplorationConfig(geometry=EUCL, iterations=5))
    assert len(info.value.trajectory.steps) == 2
    assert info.value.trajectory.halted.startswith("aborted")
