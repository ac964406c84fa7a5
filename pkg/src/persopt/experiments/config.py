"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Every experiment shares
the optimiser keys in ``COMMON``; the remaining keys are experiment specific.
Unknown keys are rejected, and values are coerced to the type of the default.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..optimizer import NoiseModel, Schedule, StopRule

__all__ = ["COMMON", "SPECIFIC", "ConfigError", "ExperimentConfig", "parse_config", "load_config", "make_config"]


class ConfigError(ValueError):
    pass


COMMON = {
    "seed": 0,
    "schedule": "inverse-time",
    "a": 0.1,
    "b": 0.01,
    "max_steps": 500,
    "loss_window": 200,
    "tol": 1e-12,
    "rel_tol": 1e-3,
    "noise": "none",
    "noise_stddev": 0.0,
}

# Per-experiment keys with defaults; optimiser keys here override COMMON.
SPECIFIC = {
    "pointcloud": {
        "n_points": 50,
        "weight_topo": 1.0,
        "weight_square": 1.0,
    },
    "image": {
        "size": 20,
        "n_salt": 10,
        "noise_level": 0.0,
        "weight_topo": 1.0,
        "weight_binary": 0.5,
        "input": "",
        "a": 0.5,
        "b": 1.0,
        "max_steps": 5000,
    },
    "regression": {
        "n_samples": 100,
        "n_features": 60,
        "noise_level": 1.0,
        "n_test": 1000,
        "weight_tv": 1.0,
        "weight_topo": 1.0,
        "n_peaks": 3,
        "a": 0.002,
        "b": 0.01,
        "max_steps": 3000,
    },
    "circle-match": {
        "n_points": 30,
        "n_outliers": 3,
        "noise_level": 0.05,
        "dim": 0,
        "max_steps": 2000,
    },
    "filter-select": {
        "n_per_class": 20,
        "size": 12,
        "theta0": 1.5707963267948966,
        "batch_size": 0,
        "n_dirs": 48,
        "k_max": 5,
        "resolution": 100,
        "input": "",
        "a": 0.5,
        "b": 1.0,
        "max_steps": 3000,
    },
}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    schedule: Schedule
    noise: NoiseModel
    stop: StopRule
    params: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "schedule": self.schedule.kind,
            "a": self.schedule.a,
            "b": self.schedule.b,
            "max_steps": self.stop.max_steps,
            "loss_window": self.stop.loss_window,
            "tol": self.stop.tol,
            "rel_tol": self.stop.rel_tol,
            "noise": self.noise.kind,
            "noise_stddev": self.noise.stddev,
            **self.params,
        }


def defaults(experiment: str) -> dict:
    if experiment not in SPECIFIC:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {sorted(SPECIFIC)}")
    return {**COMMON, **SPECIFIC[experiment]}


def _coerce(key, raw, default):
    try:
        if isinstance(default, bool):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {type(default).__name__}") from None
    return raw


def make_config(experiment: str, overrides: dict | None = None) -> ExperimentConfig:
    """Config from defaults plus ``overrides`` (already typed or strings)."""
    values = defaults(experiment)
    for key, v in (overrides or {}).items():
        if key == "experiment":
            if v != experiment:
                raise ConfigError(f"config is for {v!r}, not {experiment!r}")
            continue
        if key not in values:
            raise ConfigError(f"unknown key {key!r} for experiment {experiment!r}")
        values[key] = _coerce(key, v, values[key]) if isinstance(v, str) else type(values[key])(v)
    try:
        schedule = Schedule(values.pop("schedule"), values.pop("a"), values.pop("b"))
        noise = NoiseModel(values.pop("noise"), values.pop("noise_stddev"))
        stop = StopRule(values.pop("max_steps"), values.pop("loss_window"), values.pop("tol"),
                        values.pop("rel_tol"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    seed = values.pop("seed")
    return ExperimentConfig(experiment, seed, schedule, noise, stop, values)


def parse_config(text: str, experiment: str) -> ExperimentConfig:
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in overrides:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        overrides[key] = value
    try:
        return make_config(experiment, overrides)
    except ConfigError as exc:
        raise ConfigError(f"config: {exc}") from None


def load_config(path, experiment: str, seed: int | None = None) -> ExperimentConfig:
    if path is None:
        cfg = make_config(experiment)
    else:
        with open(path) as fh:
            cfg = parse_config(fh.read(), experiment)
    if seed is not None:
        cfg.seed = int(seed)
    return cfg
