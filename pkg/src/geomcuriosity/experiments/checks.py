"""Registered numerical checks behind the ``oracle`` and ``check`` subcommands.

Each check returns a :class:`CheckResult` with the statistic it measured and
the threshold it was held to.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import ortho_group, spearmanr

from ..agent import (AgentState, candidate_position, enumerate_moves, initial_state,
                     score_moves, select_move)
from ..belief import (GaussianBelief, SensorModel, condition, epistemic_value,
                      epistemic_value_det_ratio)
from ..exceptions import NumericalError
from ..geometry import (Frame, GeometryKind, HomTransform, face_object_frame,
                        frame_map, projective_embedding, rho, transition_map)
from ..oracle import (NodeGrid, SampleCloud, ball_epistemic_value, epsilon_precondition,
                      jacobian_preference_check, mc_mutual_information)
from . import output
from ..pushforward import IntegrationConfig, pushforward_affine, pushforward_projective


@dataclass
class CheckResult:
    name: str
    statistic: float
    threshold: float
    passed: bool
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.statistic:.6g} (threshold {self.threshold:g}) {self.detail}"


def _lt(name, stat, thr, detail=""):
    stat = float(stat)
    return CheckResult(name, stat, thr, bool(stat < thr), detail)


def random_frame(rng, dim, spread=3.0):
    """Frame with a uniformly random rotation and origin in ``[-spread, spread]^d``."""
    rot = ortho_group.rvs(dim, random_state=rng)
    if np.linalg.det(rot) < 0:
        rot[:, 0] = -rot[:, 0]
    return Frame(rng.uniform(-spread, spread, dim), rot)


def random_spd(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim))
    return scale ** 2 * (a @ a.T / dim + 0.1 * np.eye(dim))


# --- oracle suite -------------------------------------------------------------

def _sim1_moves(config):
    kind = GeometryKind.projective(config.gamma)
    state = initial_state(config.exploration_config(kind))
    obj = np.asarray(config.object, float)
    frames = [face_object_frame(candidate_position(state.position, obj, m), obj)
              for m in enumerate_moves(state, obj, config.step_norm)]
    return state, frames


def _ball_values(cloud, maps, eps):
    return [ball_epistemic_value(cloud, m, eps, return_std=True) for m in maps]


def check_mi_closed_form(config, seed):
    rng = np.random.default_rng([seed, 11])
    worst = 0.0
    for i in range(config.oracle.mi_instances):
        cov = random_spd(rng, config.dim, scale=rng.uniform(0.2, 2.0))
        sensor = SensorModel(float(np.exp(rng.uniform(np.log(0.1), np.log(2.0)))))
        belief = GaussianBelief(rng.normal(size=config.dim), cov)
        est, se = mc_mutual_information(belief, sensor, config.oracle.mi_samples, [seed, 12, i])
        worst = max(worst, abs(est - epistemic_value(belief, sensor)) / se)
    return _lt("mi_closed_form_vs_mc", worst, 3.0,
               f"max |closed - mc| / se over {config.oracle.mi_instances} instances")


def check_mi_analytic():
    val = epistemic_value(GaussianBelief(np.zeros(3), np.eye(3)), SensorModel(1.0))
    return _lt("mi_analytic_identity_d3", abs(val - 0.5 * math.log(8)), 1e-12)


def check_ball_euclidean_invariance(config, seed):
    kind = GeometryKind.euclidean()
    state = initial_state(config.exploration_config(kind))
    _, frames = _sim1_moves(config)
    rng = np.random.default_rng([seed, 21])
    belief = GaussianBelief(state.belief.mean, random_spd(rng, config.dim, config.oracle.cloud_sigma))
    cloud = SampleCloud.from_belief(belief, config.oracle.cloud_size, [seed, 22])
    eps = config.oracle.epsilon_factor * config.oracle.cloud_sigma
    maps = [transition_map(state.frame, f, kind) for f in frames]
    vals = _ball_values(cloud, maps, eps)
    worst = max(abs(va - vb) / math.hypot(sa, sb)
                for i, (va, sa) in enumerate(vals) for vb, sb in vals[i + 1:])
    return _lt("ball_euclidean_invariance", worst, 3.0,
               "max pairwise |C_a - C_b| / combined se over the 9 moves")


def _projective_cloud(config, seed, n=None):
    state, frames = _sim1_moves(config)
    belief = GaussianBelief.isotropic(state.belief.mean, config.oracle.cloud_sigma)
    cloud = SampleCloud.from_belief(belief, n or config.oracle.cloud_size, seed)
    kind = GeometryKind.projective(config.gamma)
    maps = [transition_map(state.frame, f, kind) for f in frames]
    return cloud, maps


def decade_epsilons(config):
    lo, hi = config.oracle.epsilon_decade
    return [f * config.oracle.cloud_sigma for f in np.geomspace(lo, hi, config.oracle.decade_points)]


def check_ball_projective_ordering(config, seed):
    cloud, maps = _projective_cloud(config, [seed, 31])
    worst = math.inf
    detail = []
    for eps in decade_epsilons(config):
        vals = _ball_values(cloud, maps, eps)
        approach, retreat = vals[1], vals[5]
        others = [v for i, (v, _) in enumerate(vals) if i != 1]
        z = (approach[0] - retreat[0]) / math.hypot(approach[1], retreat[1])
        if approach[0] <= max(others):
            z = -math.inf
        worst = min(worst, z)
        detail.append(f"eps={eps:.4g}:z={z:.1f}")
    return CheckResult("ball_projective_ordering", worst, 3.0, worst > 3.0,
                       "min (approach - retreat)/se over eps decade; " + " ".join(detail))


def check_ball_degenerate(config):
    cloud = SampleCloud(np.tile(np.asarray(config.object, float), (10_000, 1)))
    grid = NodeGrid.covering(cloud.points, 0.01)
    return _lt("ball_degenerate_zero", abs(ball_epistemic_value(cloud, None, 0.01, grid)), 1e-12)


def check_epsilon_scaling(config, seed):
    eps = config.oracle.epsilon_factor * config.oracle.cloud_sigma * 2
    worst = -math.inf
    for s in range(config.oracle.scaling_seeds):
        cloud, maps = _projective_cloud(config, [seed, 41, s], n=max(10_000, config.oracle.cloud_size // 5))
        gaps = []
        for e in (eps, eps / 2):
            (va, sa), (vr, sr) = _ball_values(cloud, [maps[1], maps[5]], e)
            gaps.append((va - vr, math.hypot(sa, sr)))
        drop = (gaps[0][0] - gaps[1][0]) / math.hypot(gaps[0][1], gaps[1][1])
        worst = max(worst, drop)
    return _lt("epsilon_scaling_gap", worst, 3.0,
               "max decrease of approach-retreat gap on halving eps, in se units")


def check_epsilon_precondition(config, seed):
    cloud, _ = _projective_cloud(config, [seed, 51], n=10_000)
    eps = config.oracle.epsilon_factor * config.oracle.cloud_sigma
    ratio, _ = epsilon_precondition(cloud, eps)
    return _lt("epsilon_precondition", ratio, 0.5, "eps / min marginal std of the cloud")


def check_jacobian_ratio():
    obj = np.array([0.0, 0.0, 3.0])
    frames = [face_object_frame([0.0, 0.0, 2.0], obj), face_object_frame([0.0, 0.0, 1.0], obj)]
    (_, near), (_, far) = jacobian_preference_check(frames, obj, 1.0)
    return _lt("jacobian_ratio_d3", abs(near / far - 5.0625), 1e-9, "distance 1 vs 2, gamma=1")


def check_jacobian_ranking(seed, n_sets=20):
    rng = np.random.default_rng([seed, 61])
    worst = 1.0
    for _ in range(n_sets):
        obj = rng.uniform(-2, 2, 3)
        pos = obj + rng.normal(size=(8, 3)) * rng.uniform(0.5, 4.0, (8, 1))
        frames = [face_object_frame(p, obj) for p in pos]
        dets = [d for _, d in jacobian_preference_check(frames, obj, rng.uniform(0.5, 2.0))]
        dist = np.linalg.norm(pos - obj, axis=1)
        worst = min(worst, spearmanr(dets, -dist)[0])
    return CheckResult("jacobian_rank_correlation", worst, 1.0, bool(worst == 1.0),
                       "min Spearman(det, -distance) over random frame sets")


def _guarded(name, fn):
    """Run one check; a numerical failure inside it becomes a failed result."""
    try:
        return fn()
    except NumericalError as exc:
        return CheckResult(name, math.nan, math.nan, False, f"{type(exc).__name__}: {exc}")


def oracle_checks(config, seed):
    """Registered oracle checks as ``(name, thunk)`` pairs, in report order."""
    return [
        ("epsilon_precondition", lambda: check_epsilon_precondition(config, seed)),
        ("mi_analytic_identity_d3", check_mi_analytic),
        ("mi_closed_form_vs_mc", lambda: check_mi_closed_form(config, seed)),
        ("ball_degenerate_zero", lambda: check_ball_degenerate(config)),
        ("ball_euclidean_invariance", lambda: check_ball_euclidean_invariance(config, seed)),
        ("ball_projective_ordering", lambda: check_ball_projective_ordering(config, seed)),
        ("epsilon_scaling_gap", lambda: check_epsilon_scaling(config, seed)),
        ("jacobian_ratio_d3", check_jacobian_ratio),
        ("jacobian_rank_correlation", lambda: check_jacobian_ranking(seed)),
    ]


def run_oracle_checks(config, seed=None):
    seed = config.seed if seed is None else seed
    return [_guarded(name, fn) for name, fn in oracle_checks(config, seed)]


# --- invariant suite ------------------------------------------------------------

def check_group_axioms(seed, n_frames=1000, dim=3, gamma=1.0):
    rng = np.random.default_rng([seed, 71])
    kind = GeometryKind.projective(gamma)
    ident = HomTransform.identity(dim).matrix
    worst = 0.0
    for _ in range(n_frames // 3):
        f0, f1, f2 = (random_frame(rng, dim) for _ in range(3))
        t01 = transition_map(f0, f1, kind)
        t12 = transition_map(f1, f2, kind)
        t02 = transition_map(f0, f2, kind)
        worst = max(worst,
                    np.max(np.abs((t12 @ t01).matrix - t02.matrix)),
                    np.max(np.abs(transition_map(f0, f0, kind).matrix - ident)),
                    np.max(np.abs((t01.inverse() @ t01).matrix - ident)))
    return _lt("group_axioms_projective", worst, 1e-10, f"{n_frames} random frames")


def check_euclidean_rigidity(seed, n=1000, dim=3):
    rng = np.random.default_rng([seed, 72])
    worst = 0.0
    for _ in range(n // 10):
        t = transition_map(random_frame(rng, dim), random_frame(rng, dim), GeometryKind.euclidean())
        p, q = rng.normal(size=(2, 10, dim)) * 3
        worst = max(worst, np.max(np.abs(np.linalg.norm(t(p) - t(q), axis=1)
                                         - np.linalg.norm(p - q, axis=1))))
    return _lt("euclidean_rigidity", worst, 1e-10)


def check_embedding_factorization(seed, n=100, dim=3, gamma=1.0):
    rng = np.random.default_rng([seed, 73])
    worst = 0.0
    for _ in range(n):
        f = random_frame(rng, dim)
        p = f.origin + f.basis @ np.append(rng.normal(size=dim - 1), rng.uniform(0.1, 5.0))
        worst = max(worst, np.max(np.abs(projective_embedding(f, gamma)(p)
                                         - rho(frame_map(f)(p), gamma))))
    return _lt("embedding_factorization", worst, 1e-12)


def check_jacobian_fd(seed, n=100, dim=3, h=1e-5):
    rng = np.random.default_rng([seed, 74])
    worst = 0.0
    for _ in range(n):
        t = transition_map(random_frame(rng, dim), random_frame(rng, dim),
                           GeometryKind.projective(rng.uniform(0.5, 2.0)))
        p = rng.normal(size=dim)
        if abs(t.homogeneous_action(p)[1]) < 0.2 * np.max(np.abs(t.matrix)):
            continue
        jac = np.column_stack([(t(p + h * e) - t(p - h * e)) / (2 * h) for e in np.eye(dim)])
        fd = np.linalg.det(jac)
        worst = max(worst, abs(t.jacobian_det(p) - fd) / abs(fd))
    return _lt("jacobian_finite_difference", worst, 1e-5, "relative error, h=1e-5")


def check_mi_rotation(seed, n=100, dim=3):
    rng = np.random.default_rng([seed, 75])
    worst = 0.0
    for _ in range(n):
        cov = random_spd(rng, dim)
        q = ortho_group.rvs(dim, random_state=rng)
        s = SensorModel(rng.uniform(0.1, 2.0))
        worst = max(worst, abs(epistemic_value(GaussianBelief(np.zeros(dim), cov), s)
                               - epistemic_value(GaussianBelief(np.zeros(dim), q @ cov @ q.T), s)))
    return _lt("mi_rotation_invariance", worst, 1e-10)


def check_mi_det_identity(seed, n=100, dim=3):
    rng = np.random.default_rng([seed, 76])
    worst = 0.0
    for _ in range(n):
        b = GaussianBelief(np.zeros(dim), random_spd(rng, dim))
        s = SensorModel(rng.uniform(0.3, 2.0))
        worst = max(worst, abs(epistemic_value(b, s) - epistemic_value_det_ratio(b, s)))
    return _lt("mi_det_identity", worst, 1e-10)


def check_posterior_value(seed, n=100, dim=3):
    rng = np.random.default_rng([seed, 77])
    worst = -math.inf
    for _ in range(n):
        b = GaussianBelief(rng.normal(size=dim), random_spd(rng, dim))
        s = SensorModel(rng.uniform(0.1, 2.0))
        post = condition(b, s, rng.normal(size=dim) * 3)
        worst = max(worst, epistemic_value(post, s) - epistemic_value(b, s))
    return _lt("posterior_value_decreases", worst, 0.0, "max (C_post - C_prior)")


def check_pushforward_affine_consistency(seed, n=20, dim=2):
    rng = np.random.default_rng([seed, 78])
    worst = 0.0
    for i in range(n):
        b = GaussianBelief(rng.normal(size=dim), random_spd(rng, dim))
        amap = transition_map(random_frame(rng, dim), random_frame(rng, dim), GeometryKind.euclidean())
        exact = pushforward_affine(b, amap)
        cfg = IntegrationConfig(sample_count=20_000, seed=i)
        approx = pushforward_projective(b, amap.to_homogeneous(), cfg)
        se = np.sqrt(np.diag(approx.cov) / cfg.sample_count)
        worst = max(worst, np.max(np.abs(approx.mean - exact.mean) / se))
    return _lt("pushforward_affine_consistency", worst, 4.0, "max |mean diff| / se per axis")


def check_euclidean_selection(seed, n=50, dim=2):
    rng = np.random.default_rng([seed, 79])
    kind = GeometryKind.euclidean()
    sensor = SensorModel(0.1)
    worst = 0.0
    idle_always = True
    for _ in range(n):
        pos = rng.uniform(-3, 3, dim)
        obj = pos + rng.normal(size=dim) * 2 + 0.5
        state = AgentState(face_object_frame(pos, obj),
                           GaussianBelief(rng.normal(size=dim), random_spd(rng, dim, 0.5)))
        scored = score_moves(state, obj, kind, sensor, step_norm=0.1)
        vals = [s.epistemic_value for s in scored]
        worst = max(worst, max(vals) - min(vals))
        idle_always &= select_move(scored).is_idle
    return CheckResult("euclidean_selection_invariance", worst, 1e-4,
                       bool(worst < 1e-4 and idle_always), "max spread of the 9 values")


def check_projective_approach(seed, n=20, dim=2, gamma=1.0, epsilon=0.05):
    rng = np.random.default_rng([seed, 80])
    kind = GeometryKind.projective(gamma)
    sensor = SensorModel(epsilon)
    misses = 0
    for i, dist in enumerate(rng.uniform(0.5, 5.0, n)):
        theta = rng.uniform(0, 2 * math.pi)
        obj = np.array([math.cos(theta), math.sin(theta)]) * dist
        frame = face_object_frame(np.zeros(dim), obj)
        y = rho(frame_map(frame)(obj), gamma)
        state = AgentState(frame, GaussianBelief.isotropic(y, 0.01))
        scored = score_moves(state, obj, kind, sensor, IntegrationConfig(seed=i), step_norm=0.1)
        best = max(scored[1:], key=lambda s: s.epistemic_value)
        misses += best.move.index != 0
    return CheckResult("projective_approach", misses, 0, misses == 0,
                       "argmax translation != approach, over distances in [0.5, 5]")


def invariant_checks(seed):
    """Registered invariant checks as ``(name, thunk)`` pairs, in report order."""
    return [
        ("group_axioms_projective", lambda: check_group_axioms(seed)),
        ("euclidean_rigidity", lambda: check_euclidean_rigidity(seed)),
        ("embedding_factorization", lambda: check_embedding_factorization(seed)),
        ("jacobian_finite_difference", lambda: check_jacobian_fd(seed)),
        ("mi_rotation_invariance", lambda: check_mi_rotation(seed)),
        ("mi_det_identity", lambda: check_mi_det_identity(seed)),
        ("posterior_value_decreases", lambda: check_posterior_value(seed)),
        ("pushforward_affine_consistency", lambda: check_pushforward_affine_consistency(seed)),
        ("euclidean_selection_invariance", lambda: check_euclidean_selection(seed)),
        ("projective_approach", lambda: check_projective_approach(seed)),
    ]


def run_invariant_checks(config, seed=None):
    seed = config.seed if seed is None else seed
    return [_guarded(name, fn) for name, fn in invariant_checks(seed)]

def _run_suite(checks, config, out_dir, filename):
    out_dir = Path(out_dir or config.output_dir)
    output.write_report_csv(out_dir / filename, checks, config.snapshot())
    return checks


def run_oracle_suite(config, out_dir=None):
    """Run the oracle checks and write ``oracle_report.csv``."""
    return _run_suite(run_oracle_checks(config), config, out_dir, "oracle_report.csv")


def run_check_suite(config, out_dir=None):
    """Run the invariant checks and write ``check_report.csv``."""
    return _run_suite(run_invariant_checks(config), config, out_dir, "check_report.csv")
