"""The two simulation protocols: a fixed-object run and a first-step grid sweep."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..agent import ExplorationAborted, run_exploration
from ..estimator import CuriousExplorer
from . import output

logger = logging.getLogger(__name__)

BIN_LABELS = ["idle"] + [str(k) for k in range(8)]


def run_sim1(config, out_dir=None):
    """Explore from ``config.start`` towards ``config.object`` for each geometry.

    Writes ``trajectory_<kind>.csv`` per geometry and ``trajectories.svg``.
    On a numerical abort the partial trajectory is still written before the
    error propagates.

    Returns
    -------
    dict
        Geometry tag -> :class:`~geomcuriosity.agent.Trajectory`.
    """
    out_dir = Path(out_dir or config.output_dir)
    snap = config.snapshot()
    trajectories = {}
    for kind in config.kinds():
        try:
            traj = run_exploration(config.exploration_config(kind))
        except ExplorationAborted as exc:
            output.write_trajectory_csv(out_dir / f"trajectory_{kind.tag}.csv", exc.trajectory, snap)
            raise
        trajectories[kind.tag] = traj
        output.write_trajectory_csv(out_dir / f"trajectory_{kind.tag}.csv", traj, snap)
        logger.info("sim1 %s: %d steps, halted=%s", kind.tag, len(traj.steps), traj.halted)
    output.write_trajectories_svg(out_dir / "trajectories.svg", trajectories, config.object, snap)
    return trajectories


@dataclass(eq=False)
class GridResult:
    """First-step move values over a grid of object positions.

    ``values[i]`` holds idle then directions 0..7 for ``positions[i]``;
    ``mean`` and ``std_error`` aggregate each of those 9 bins over positions.
    """

    kind: str
    positions: np.ndarray
    values: np.ndarray
    n_excluded: int

    def __post_init__(self):
        vals = np.where(np.isfinite(self.values), self.values, np.nan)
        finite = ~np.isnan(vals)
        counts = finite.sum(axis=0)
        self.counts = counts
        self.mean = np.nansum(vals, axis=0) / np.maximum(counts, 1)
        sq = np.where(finite, (vals - self.mean) ** 2, 0.0).sum(axis=0)
        # bins with fewer than two finite values get a zero standard error
        var = np.where(counts > 1, sq / np.maximum(counts - 1, 1), 0.0)
        self.std_error = np.sqrt(var / np.maximum(counts, 1))

    def profile_rows(self):
        angles = [0.0] + [2 * math.pi * k / 8 for k in range(8)]
        return list(zip(BIN_LABELS, angles, self.mean, self.std_error, self.counts.tolist()))


def grid_scores(config, kind):
    """Score the first move set for every grid object position."""
    positions, n_excluded = config.grid.object_positions(np.asarray(config.start, float),
                                                         config.dim)
    integ = config.integration_config()
    est = CuriousExplorer(geometry=kind.tag, gamma=kind.gamma, epsilon=config.epsilon,
                          sigma0=config.sigma0, step_norm=config.step_norm,
                          idle_band=config.idle_band, min_distance=config.min_distance,
                          integration=integ.scheme, sample_count=integ.sample_count,
                          nodes_per_axis=integ.nodes_per_axis, start=config.start,
                          random_state=config.seed,
                          raw_frame_observation=config.raw_frame_observation)
    return GridResult(kind.tag, positions, est.decision_function(positions), n_excluded)


def run_sim2(config, out_dir=None):
    """Grid sweep of first-step epistemic values for each geometry.

    Writes ``grid_<kind>.csv``, ``direction_profile.csv`` and
    ``epistemic_by_direction.svg``.
    """
    out_dir = Path(out_dir or config.output_dir)
    snap = config.snapshot()
    results = {}
    for kind in config.kinds():
        res = grid_scores(config, kind)
        logger.info("sim2 %s: %d positions, %d excluded", kind.tag, len(res.positions),
                    res.n_excluded)
        output.write_grid_csv(out_dir / f"grid_{kind.tag}.csv", res, snap)
        results[kind.tag] = res
    output.write_profile_csv(out_dir / "direction_profile.csv", results, snap)
    output.write_profile_svg(out_dir / "epistemic_by_direction.svg", results, snap)
    return results
