"""Run configuration: seed, named tolerances, caps and output format."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

ENV_CONFIG = "POISSONDIRAC_CONFIG"

DEFAULT_TOLERANCES: dict[str, float] = {
    "relation": 1e-12,  # quantum-torus generator relations
    "float_param": 1e-12,  # floating SkewParam comparisons
    "curve": 1e-12,  # |f| on polished zero curves
    "grad": 1e-6,  # relative lower bound for |grad f| on the zero set
    "period": 1e-6,  # period-label comparison
    "volume": 1e-6,  # agreement of the last two volume extrapolations
}

DEFAULT_CAPS: dict[str, int] = {
    "grid": 512,
    "bfs_nodes": 200_000,
    "bfs_depth": 8,
    "group_order": 24,
}

FORMATS = ("json", "dot", "text")


class ConfigError(ValueError):
    """Invalid configuration; ``pointer`` is a JSON pointer into the config document."""

    code = "bad_config"

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer


@dataclass(frozen=True)
class Config:
    seed: int = 0
    tolerances: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    caps: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_CAPS))
    output_format: str = "json"

    def __post_init__(self):
        for name, v in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}", f"/tolerances/{name}")
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {name!r} must be a positive number, got {v!r}", f"/tolerances/{name}")
        for name, v in self.caps.items():
            if name not in DEFAULT_CAPS:
                raise ConfigError(f"unknown cap {name!r}", f"/caps/{name}")
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"cap {name!r} must be a positive integer, got {v!r}", f"/caps/{name}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output_format must be one of {FORMATS}", "/output_format")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer", "/seed")

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    def cap(self, name: str) -> int:
        return int(self.caps[name])

    def with_overrides(
        self,
        seed: int | None = None,
        tolerances: Mapping[str, float] | None = None,
        output_format: str | None = None,
    ) -> "Config":
        return replace(
            self,
            seed=self.seed if seed is None else seed,
            tolerances={**self.tolerances, **(tolerances or {})},
            output_format=output_format or self.output_format,
        )

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "caps": dict(self.caps),
            "output_format": self.output_format,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Config":
        if not isinstance(obj, Mapping):
            raise ConfigError("config must be a JSON object", "")
        unknown = set(obj) - {"seed", "tolerances", "caps", "output_format"}
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown config key {key!r}", f"/{key}")
        return cls(
            seed=obj.get("seed", 0),
            tolerances={**DEFAULT_TOLERANCES, **obj.get("tolerances", {})},
            caps={**DEFAULT_CAPS, **obj.get("caps", {})},
            output_format=obj.get("output_format", "json"),
        )


def load_config(path: str | None = None) -> Config:
    """Read ``path``, else the file named by ``$POISSONDIRAC_CONFIG``, else the defaults."""
    path = path or os.environ.get(ENV_CONFIG) or None
    if path is None:
        return Config()
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    return Config.from_json(obj)


def parse_tolerance_override(text: str) -> tuple[str, float]:
    """``NAME=VALUE`` from the ``--tol`` flag."""
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise ConfigError(f"--tol expects NAME=VALUE, got {text!r}", "")
    try:
        v = float(value)
    except ValueError as exc:
        raise ConfigError(f"tolerance value {value!r} is not a number", f"/tolerances/{name}") from exc
    return name, v
