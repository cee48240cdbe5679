"""JSON scenario configuration for the command line tool.

Angles are given in degrees, lengths in the unit named by the key suffix
(``_nm``, ``_um``, ``_mm``, ``_m``), times in 1/Gamma. Unknown keys are
rejected so that typos do not silently fall back to defaults.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

from .exceptions import DomainError
from .model import CloudSpec, DriveSpec, Geometry, make_geometry


class ConfigError(DomainError):
    """Invalid scenario configuration."""


@dataclass
class GeometryBlock:
    theta0_deg: float = 4.3
    lambda_nm: float = 780.0
    h_mm: float = 5.0
    L_m: float = 0.0
    theta_deg: float | None = None


@dataclass
class CloudBlock:
    n_atoms: int = 100_000
    s_r_um: float = 500.0
    s_z_um: float = 500.0


@dataclass
class DriveBlock:
    s0: float = 5.0
    gamma_wp_deg: float = 45.0
    s: float | None = None


@dataclass
class AtomBlock:
    z_um: float = 0.0


SWEEP_VARIABLES = ("tau", "theta", "gamma", "z", "nu")


@dataclass
class SweepBlock:
    variable: str | None = None
    range: list | None = None
    points: int | None = None


@dataclass
class ScenarioConfig:
    geometry: GeometryBlock = field(default_factory=GeometryBlock)
    cloud: CloudBlock = field(default_factory=CloudBlock)
    drive: DriveBlock = field(default_factory=DriveBlock)
    atom: AtomBlock = field(default_factory=AtomBlock)
    sweep: SweepBlock = field(default_factory=SweepBlock)
    method: str = "quadrature"
    seed: int = 0
    tol: float = 1e-8
    n_samples: int = 100_000
    tau: float = 0.0
    output: str = "mbs_lab_out.csv"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def build_geometry(self) -> Geometry:
        g = self.geometry
        theta = math.radians(g.theta_deg) if g.theta_deg is not None else None
        return make_geometry(math.radians(g.theta0_deg), theta, wavelength=g.lambda_nm * 1e-9,
                             h=g.h_mm * 1e-3, L=g.L_m)

    def build_cloud(self) -> CloudSpec:
        c = self.cloud
        return CloudSpec(c.n_atoms, c.s_r_um * 1e-6, c.s_z_um * 1e-6)

    def build_drive(self) -> DriveSpec:
        return DriveSpec(self.drive.s0, math.radians(self.drive.gamma_wp_deg))

    @property
    def gamma_wp(self) -> float:
        return math.radians(self.drive.gamma_wp_deg)

    def saturation(self) -> float:
        """Saturation for emitter-only commands: ``drive.s`` or else 2 s0."""
        return self.drive.s if self.drive.s is not None else 2.0 * self.drive.s0


_BLOCKS = {"geometry": GeometryBlock, "cloud": CloudBlock, "drive": DriveBlock,
           "atom": AtomBlock, "sweep": SweepBlock}


def _fill(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key '{where}.{key}'" if where else f"unknown key '{key}'")
    return cls(**data)


def _number(value, key, *, positive=False, nonneg=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' must be a number")
    if not math.isfinite(value):
        raise ConfigError(f"'{key}' must be finite")
    if integer and int(value) != value:
        raise ConfigError(f"'{key}' must be an integer")
    if positive and not value > 0:
        raise ConfigError(f"'{key}' must be > 0")
    if nonneg and not value >= 0:
        raise ConfigError(f"'{key}' must be >= 0")
    return value


def parse_config(data: dict) -> ScenarioConfig:
    """Validate a decoded JSON document into a :class:`ScenarioConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    top = {}
    for key, value in data.items():
        if key in _BLOCKS:
            top[key] = _fill(_BLOCKS[key], value, key)
        else:
            top[key] = value
    cfg = _fill(ScenarioConfig, top, "")

    g, c, d, a, sw = cfg.geometry, cfg.cloud, cfg.drive, cfg.atom, cfg.sweep
    _number(g.theta0_deg, "geometry.theta0_deg", positive=True)
    _number(g.lambda_nm, "geometry.lambda_nm", positive=True)
    _number(g.h_mm, "geometry.h_mm", positive=True)
    _number(g.L_m, "geometry.L_m", nonneg=True)
    if g.theta_deg is not None:
        _number(g.theta_deg, "geometry.theta_deg", positive=True)
    _number(c.n_atoms, "cloud.n_atoms", positive=True, integer=True)
    _number(c.s_r_um, "cloud.s_r_um", positive=True)
    _number(c.s_z_um, "cloud.s_z_um", positive=True)
    _number(d.s0, "drive.s0", nonneg=True)
    _number(d.gamma_wp_deg, "drive.gamma_wp_deg")
    if d.s is not None:
        _number(d.s, "drive.s", nonneg=True)
    _number(a.z_um, "atom.z_um")
    if sw.variable is not None and sw.variable not in SWEEP_VARIABLES:
        raise ConfigError(f"'sweep.variable' must be one of {SWEEP_VARIABLES}")
    if sw.points is not None:
        _number(sw.points, "sweep.points", positive=True, integer=True)
        if sw.points < 2:
            raise ConfigError("'sweep.points' must be >= 2")
    if sw.range is not None:
        if not (isinstance(sw.range, list) and len(sw.range) == 2):
            raise ConfigError("'sweep.range' must be [start, stop]")
        for v in sw.range:
            _number(v, "sweep.range")
        if not sw.range[1] > sw.range[0]:
            raise ConfigError("'sweep.range' must be increasing")
    if cfg.method not in ("quadrature", "montecarlo", "closed_perp", "single_atom"):
        raise ConfigError("'method' must be quadrature, montecarlo, closed_perp or single_atom")
    _number(cfg.seed, "seed", nonneg=True, integer=True)
    _number(cfg.tol, "tol", positive=True)
    if not 1e-10 <= cfg.tol <= 1e-2:
        raise ConfigError("'tol' must lie in [1e-10, 1e-2]")
    _number(cfg.n_samples, "n_samples", positive=True, integer=True)
    _number(cfg.tau, "tau", nonneg=True)
    if not isinstance(cfg.output, str) or not cfg.output:
        raise ConfigError("'output' must be a non-empty path")
    try:
        cfg.build_geometry()
        cfg.build_cloud()
        cfg.build_drive()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)
