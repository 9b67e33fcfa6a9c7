"""Experiment configuration: strict JSON schema, validation and channel synthesis."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

import numpy as np

from .channel import draw_scatterers, make_rng, rebuild, user_channel
from .geometry import ArrayGeometry, GeometryError, PolarPoint

PAPER_DEFAULT = "paper-default"


class ScenarioError(ValueError):
    """Scenario file could not be parsed or violates an invariant."""


@dataclass(frozen=True)
class ArraySpec:
    num_elements: int = 256
    carrier_freq: float = 30e9
    spacing: float | None = None

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.num_elements, self.carrier_freq, self.spacing)


@dataclass(frozen=True)
class UserSpec:
    angle_deg: float
    range_m: float
    num_scatterers: int = 2

    @property
    def location(self) -> PolarPoint:
        return PolarPoint.from_degrees(self.angle_deg, self.range_m)


@dataclass(frozen=True)
class TargetSpec:
    angle_deg: float = 45.0
    range_m: float = 5.0

    @property
    def location(self) -> PolarPoint:
        return PolarPoint.from_degrees(self.angle_deg, self.range_m)


@dataclass(frozen=True)
class Scenario:
    tx_array: ArraySpec = ArraySpec()
    rx_array: ArraySpec = ArraySpec()
    users: tuple = (UserSpec(0.0, 5.0), UserSpec(0.0, 15.0))
    target: TargetSpec = TargetSpec()
    total_power: float = 1.0
    noise_power: float = 1.0
    rho: float = 0.5
    gamma_db_list: tuple = tuple(float(g) for g in range(0, 21, 2))
    rng_seed: int = 0
    amplitude_aware: bool = False
    scatterer_power_db: float = -10.0
    dof_threshold_db: float = -20.0
    target_power_floor: float | None = None
    reflection_gain: float = 1.0
    sensing_snapshots: int = 256
    sensing_noise_power: float | None = None

    def __post_init__(self):
        validate(self)

    @property
    def tx_geom(self) -> ArrayGeometry:
        return self.tx_array.geometry()

    @property
    def rx_geom(self) -> ArrayGeometry:
        return self.rx_array.geometry()

    @property
    def gamma_floor(self) -> float:
        """Target illumination floor; ``0.1 * noise_power * N_t`` unless configured."""
        if self.target_power_floor is not None:
            return self.target_power_floor
        return 0.1 * self.noise_power * self.tx_array.num_elements

    @property
    def echo_noise_power(self) -> float:
        return self.noise_power if self.sensing_noise_power is None else self.sensing_noise_power

    def to_dict(self) -> dict:
        d = asdict(self)
        d["users"] = [asdict(u) for u in self.users]
        d["gamma_db_list"] = list(self.gamma_db_list)
        return d

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def replace(self, **changes) -> "Scenario":
        d = self.to_dict()
        d.update(changes)
        return from_dict(d)


def validate(s: Scenario) -> None:
    def need(cond, key, msg):
        if not cond:
            raise ScenarioError(f"{key}: {msg}")

    for name in ("tx_array", "rx_array"):
        try:
            getattr(s, name).geometry()
        except GeometryError as exc:
            raise ScenarioError(f"{name}: {exc}") from None
    need(len(s.users) >= 1, "users", "at least one user is required")
    for i, u in enumerate(s.users):
        try:
            loc = u.location
        except GeometryError as exc:
            raise ScenarioError(f"users[{i}]: {exc}") from None
        need(loc.range > s.tx_geom.aperture / 2, f"users[{i}].range_m", "must exceed the half-aperture")
        need(int(u.num_scatterers) == u.num_scatterers and u.num_scatterers >= 0,
             f"users[{i}].num_scatterers", "must be a non-negative integer")
    try:
        t = s.target.location
    except GeometryError as exc:
        raise ScenarioError(f"target: {exc}") from None
    need(t.range > s.tx_geom.aperture / 2, "target.range_m", "must exceed the half-aperture")
    need(s.total_power > 0, "total_power", "must be > 0")
    need(s.noise_power > 0, "noise_power", "must be > 0")
    need(0.0 <= s.rho <= 1.0, "rho", "must lie in [0, 1]")
    need(all(math.isfinite(g) for g in s.gamma_db_list), "gamma_db_list", "entries must be finite")
    need(isinstance(s.rng_seed, int) and s.rng_seed >= 0, "rng_seed", "must be a non-negative integer")
    need(s.dof_threshold_db < 0, "dof_threshold_db", "must be negative")
    need(s.target_power_floor is None or s.target_power_floor > 0, "target_power_floor", "must be > 0")
    need(s.reflection_gain > 0, "reflection_gain", "must be > 0")
    need(isinstance(s.sensing_snapshots, int) and s.sensing_snapshots >= 1, "sensing_snapshots", "must be >= 1")
    need(s.sensing_noise_power is None or s.sensing_noise_power > 0, "sensing_noise_power", "must be > 0")


_NESTED = {"tx_array": ArraySpec, "rx_array": ArraySpec, "target": TargetSpec}
_TOP_KEYS = set(Scenario.__dataclass_fields__)


def _strict(cls, data, where):
    if not isinstance(data, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = set(data) - set(cls.__dataclass_fields__)
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario: top level must be an object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"scenario: unknown key(s) {sorted(unknown)}")
    kw = dict(data)
    for key, cls in _NESTED.items():
        if key in kw:
            kw[key] = _strict(cls, kw[key], key)
    if "users" in kw:
        if not isinstance(kw["users"], list):
            raise ScenarioError("users: expected a list")
        kw["users"] = tuple(_strict(UserSpec, u, f"users[{i}]") for i, u in enumerate(kw["users"]))
    if "gamma_db_list" in kw:
        kw["gamma_db_list"] = tuple(float(g) for g in kw["gamma_db_list"])
    return Scenario(**kw)


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file, or the built-in ``"paper-default"``."""
    if str(path) == PAPER_DEFAULT:
        text = resources.files(__package__).joinpath("scenarios/paper_default.json").read_text()
        where = PAPER_DEFAULT
    else:
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"scenario file not found: {p}")
        text = p.read_text()
        where = str(p)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{where}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def paper_default() -> Scenario:
    return load_scenario(PAPER_DEFAULT)


def _sub_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def scatterer_locations(s: Scenario):
    rng = make_rng(_sub_seed(s.rng_seed, 0))
    counts = [u.num_scatterers for u in s.users]
    drawn = draw_scatterers([u.location for u in s.users], max(counts, default=0), rng)
    return [locs[:c] for locs, c in zip(drawn, counts)]


def build_channels(s: Scenario, model: str = "near_field"):
    """Per-user channels of the scenario (deterministic in ``rng_seed``).

    Scatterer positions and gains are identical across ``model``; only the
    path responses change.
    """
    geom = s.tx_geom
    out = []
    for k, (u, scat) in enumerate(zip(s.users, scatterer_locations(s))):
        ch = user_channel(geom, u.location, scat, "near_field", _sub_seed(s.rng_seed, 1, k),
                          s.scatterer_power_db, s.amplitude_aware)
        if model != "near_field":
            ch = rebuild(geom, ch, model, s.amplitude_aware)
        out.append(ch)
    return out
