"""JSON experiment configuration.

Every field is optional.  Unknown keys are rejected so typos surface as
configuration errors (exit code 2) rather than silently using defaults.
"""

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..agent import ExplorationConfig
from ..exceptions import ConfigError
from ..geometry import EUCLIDEAN, PROJECTIVE, GeometryKind
from ..pushforward import IntegrationConfig

GEOMETRY_CHOICES = (EUCLIDEAN, PROJECTIVE, "both")


@dataclass
class GridSpec:
    cells: int = 20
    extent: float = 5.0
    exclusion_radius: float = 1.0

    def object_positions(self, center, dim):
        """Cell centers of a ``cells x cells`` grid over ``center +/- extent``.

        Cells closer than ``exclusion_radius`` to ``center`` are dropped.

        Returns
        -------
        positions : (n, dim) ndarray
        n_excluded : int
        """
        h = 2 * self.extent / self.cells
        ticks = -self.extent + h * (np.arange(self.cells) + 0.5)
        gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
        offsets = np.column_stack([gx.ravel(), gy.ravel()])
        keep = np.linalg.norm(offsets, axis=1) >= self.exclusion_radius
        pos = np.zeros((int(keep.sum()), dim))
        pos[:, :2] = offsets[keep]
        pos += center
        return pos, int((~keep).sum())


@dataclass
class OracleSpec:
    cloud_size: int = 100_000
    cloud_sigma: float = 0.05
    epsilon_factor: float = 0.05
    epsilon_decade: List[float] = field(default_factory=lambda: [0.04, 0.4])
    decade_points: int = 4
    mi_instances: int = 50
    mi_samples: int = 100_000
    scaling_seeds: int = 10


@dataclass
class ExperimentConfig:
    geometry: str = "both"
    gamma: float = 1.0
    dim: int = 2
    start: Optional[List[float]] = None
    object: Optional[List[float]] = None
    iterations: int = 20
    step_norm: float = 0.1
    epsilon: float = 0.1
    sigma0: float = 0.5
    idle_band: float = 1e-4
    min_distance: float = 0.2
    integration: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "out"
    observation_noise: bool = False
    raw_frame_observation: bool = False
    grid: GridSpec = field(default_factory=GridSpec)
    oracle: OracleSpec = field(default_factory=OracleSpec)

    def __post_init__(self):
        if self.geometry not in GEOMETRY_CHOICES:
            raise ConfigError(f"geometry must be one of {GEOMETRY_CHOICES}")
        if self.dim not in (2, 3):
            raise ConfigError("dim must be 2 or 3")
        if self.start is None:
            self.start = [0.0] * self.dim
        if self.object is None:
            self.object = [0.0, 2.0] + [0.0] * (self.dim - 2)
        if len(self.start) != self.dim or len(self.object) != self.dim:
            raise ConfigError("start and object must have length dim")
        if np.allclose(self.start, self.object, rtol=0, atol=1e-9):
            raise ConfigError("start and object coincide")
        try:
            self.integration_config()
            for kind in self.kinds():
                self.exploration_config(kind)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.grid.cells < 1 or self.grid.extent <= 0 or self.grid.exclusion_radius < 0:
            raise ConfigError("invalid grid specification")
        if self.oracle.cloud_size < 10_000 or self.oracle.mi_samples < 100_000:
            raise ConfigError("oracle cloud_size must be >= 1e4 and mi_samples >= 1e5")

    def kinds(self):
        tags = [EUCLIDEAN, PROJECTIVE] if self.geometry == "both" else [self.geometry]
        return [GeometryKind(t, self.gamma) for t in tags]

    def integration_config(self):
        return IntegrationConfig(**self.integration)

    def exploration_config(self, kind, obj=None):
        return ExplorationConfig(
            start=np.asarray(self.start, float),
            object=np.asarray(self.object if obj is None else obj, float),
            iterations=self.iterations,
            geometry=kind,
            step_norm=self.step_norm,
            epsilon=self.epsilon,
            sigma0=self.sigma0,
            idle_band=self.idle_band,
            min_distance=self.min_distance,
            integration=self.integration_config(),
            seed=self.seed,
            observation_noise=self.observation_noise,
            raw_frame_observation=self.raw_frame_observation,
        )

    def to_dict(self):
        out = asdict(self)
        out["integration"] = asdict(self.integration_config())
        return out

    def snapshot(self):
        """Canonical one-line JSON used in output headers."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def override(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes) if changes else self

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        data = dict(data)
        try:
            if "grid" in data:
                data["grid"] = GridSpec(**data["grid"])
            if "oracle" in data:
                data["oracle"] = OracleSpec(**data["oracle"])
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)
