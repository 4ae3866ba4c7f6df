"""Run configuration: strict key = value sections, unknown keys rejected."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

__all__ = ["RunConfig", "ConfigError", "load_config"]


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "run": {"command": str, "seed": int, "out": str, "tol": float, "figures": bool},
    "group": {"kind": str, "n": int, "structure": str},
    "profile": {"name": str, "k": int},
    "bounds": {"a": float, "a_list": "floats", "threshold": float},
    "kernel": {"extent": float, "points": int, "extent_u": float, "points_u": int,
               "max_moment_degree": int},
    "frame": {"b_list": "floats", "j_min": int, "j_max": int, "trials": int,
              "n_mod": int, "band_tol": float},
}

_DEFAULTS = {
    "run": {"command": "", "seed": 1234, "out": ".", "tol": 1e-10, "figures": True},
    "group": {"kind": "abelian", "n": 1, "structure": ""},
    "profile": {"name": "mexican-hat", "k": 1},
    "bounds": {"a": 2.0 ** (1.0 / 3.0), "a_list": (), "threshold": 1e-10},
    "kernel": {"extent": 20.0, "points": 4096, "extent_u": 10.0, "points_u": 96,
               "max_moment_degree": 3},
    "frame": {"b_list": (0.5, 0.25, 0.125), "j_min": -13, "j_max": 26, "trials": 64,
              "n_mod": 8, "band_tol": 1e-6},
}


def _parse_value(section, key, raw):
    kind = _SCHEMA[section][key]
    raw = raw.strip()
    try:
        if kind is str:
            return raw
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"invalid value for [{section}] {key}: {raw!r}") from exc
    raise ConfigError(f"unhandled schema kind for [{section}] {key}")


@dataclass
class RunConfig:
    run: dict = field(default_factory=lambda: dict(_DEFAULTS["run"]))
    group: dict = field(default_factory=lambda: dict(_DEFAULTS["group"]))
    profile: dict = field(default_factory=lambda: dict(_DEFAULTS["profile"]))
    bounds: dict = field(default_factory=lambda: dict(_DEFAULTS["bounds"]))
    kernel: dict = field(default_factory=lambda: dict(_DEFAULTS["kernel"]))
    frame: dict = field(default_factory=lambda: dict(_DEFAULTS["frame"]))

    def validate(self):
        if self.run["tol"] <= 0:
            raise ConfigError("[run] tol must be positive")
        if self.run["seed"] < 0:
            raise ConfigError("[run] seed must be nonnegative")
        if self.profile["k"] < 1:
            raise ConfigError("[profile] k must be >= 1")
        for a in (self.bounds["a"],) + tuple(self.bounds["a_list"]):
            if a <= 0 or a == 1.0:
                raise ConfigError(f"[bounds] dilation parameter must be > 0 and != 1, got {a}")
        if any(b <= 0 for b in self.frame["b_list"]):
            raise ConfigError("[frame] b_list entries must be positive")
        if self.frame["j_min"] > self.frame["j_max"]:
            raise ConfigError("[frame] j_min must not exceed j_max")
        if self.kernel["points"] < 16 or self.kernel["extent"] <= 0:
            raise ConfigError("[kernel] needs extent > 0 and points >= 16")
        return self

    def section(self, name):
        return getattr(self, name)


def load_config(path=None, overrides=None) -> RunConfig:
    """Parse an INI-style config; every key must be in the schema."""
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key '{key}' in section [{section}]")
                cfg.section(section)[key] = _parse_value(section, key, raw)
    for dotted, value in (overrides or {}).items():
        section, key = dotted.split(".", 1)
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown override {dotted}")
        cfg.section(section)[key] = value
    return cfg.validate()
