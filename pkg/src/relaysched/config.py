"""Experiment configuration and its key=value file format."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .model import ContractViolation, SystemState, StochasticParams, empty_state, make_state
from .policies import REGISTRY


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    L: int = 2
    K: int = 2
    p: float = 0.7
    q: float = 0.4
    horizon: int = 200
    replications: int = 1000
    seed: int = 0
    policies: list = field(default_factory=lambda: ["mb"])
    checkpoints: Optional[list] = None
    initial_x: Optional[list] = None
    initial_y: Optional[list] = None
    p_ss: Optional[list] = None
    p_rs: Optional[list] = None
    q_ss: Optional[list] = None
    alpha: float = 0.01
    output: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.L < 1 or self.K < 1:
            raise ConfigError(f"L and K must be >= 1 (got L={self.L}, K={self.K})")
        for name in ("p", "q", "alpha"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name}={v} is outside [0, 1]")
        if self.horizon < 0:
            raise ConfigError(f"horizon must be >= 0 (got {self.horizon})")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1 (got {self.replications})")
        for name in self.policies:
            if name not in REGISTRY:
                raise ConfigError(f"unknown policy {name!r}; known: {', '.join(REGISTRY)}")
        for t in self.checkpoints or []:
            if not 0 <= t <= self.horizon:
                raise ConfigError(f"checkpoint {t} outside [0, {self.horizon}]")
        if self.initial_x is not None and len(self.initial_x) != self.L:
            raise ConfigError(f"initial_x needs {self.L} real-queue entries")
        if self.initial_y is not None and len(self.initial_y) != self.K:
            raise ConfigError(f"initial_y needs {self.K} real-queue entries")
        if any(v < 0 for v in (self.initial_x or []) + (self.initial_y or [])):
            raise ConfigError("initial queue lengths must be nonnegative")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError(f"unknown output format {self.format!r}")
        try:
            self.params()
        except ContractViolation as exc:
            raise ConfigError(str(exc)) from None

    def params(self) -> StochasticParams:
        tup = lambda v: None if v is None else tuple(float(e) for e in v)
        sp = StochasticParams(self.p, self.q, tup(self.p_ss), tup(self.p_rs), tup(self.q_ss))
        sp.thresholds(self.L, self.K)
        return sp

    def initial_state(self) -> SystemState:
        if self.initial_x is None and self.initial_y is None:
            return empty_state(self.L, self.K)
        x = [0] + list(self.initial_x or [0] * self.L)
        y = [0] + list(self.initial_y or [0] * self.K)
        return make_state(x, y)

    def effective_checkpoints(self) -> list:
        if self.checkpoints:
            return sorted(set(self.checkpoints))
        h = self.horizon
        return sorted({h // 4, h // 2, h})


_INT = {"L", "K", "horizon", "replications", "seed"}
_FLOAT = {"p", "q", "alpha"}
_INT_LIST = {"checkpoints", "initial_x", "initial_y"}
_FLOAT_LIST = {"p_ss", "p_rs", "q_ss"}
_STR_LIST = {"policies"}
_STR = {"output", "format"}
KEYS = _INT | _FLOAT | _INT_LIST | _FLOAT_LIST | _STR_LIST | _STR


def coerce(key: str, raw: str):
    """Convert a raw string value for ``key``."""
    if key in _INT:
        return int(raw)
    if key in _FLOAT:
        return float(raw)
    items = [s for s in raw.replace(",", " ").split() if s]
    if key in _INT_LIST:
        return [int(s) for s in items]
    if key in _FLOAT_LIST:
        return [float(s) for s in items]
    if key in _STR_LIST:
        return items
    return raw


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Lists are comma or space separated."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = coerce(key, raw)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value {raw!r} for {key}") from None
    return values


def build_config(file_values: dict, overrides: dict) -> ExperimentConfig:
    """Merge file values with flag overrides (flags win) and validate."""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in merged.items() if k in known})
