"""Run configuration files.

A config is one JSON object::

    {
      "model":   {"name": "2pc", "params": {...}},
      "delay":   {"family": "lognormal", "mu": -3.0, "sigma": 0.5},
      "faults":  {"behaviors": [...], "<section>": {...}},
      "events":  {"start": "propose", "decision": "finish"},
      "metric":  {"name": "avg-latency", "params": {}},
      "horizon": 100.0,
      "smc":     {"alpha": 0.05, "delta": 0.01, "min_runs": 30, "max_runs": 10000, "base_seed": 0}
    }

Only ``model`` is required. Missing ``events`` fall back to the model's
defaults, a missing ``delay`` to the lognormal above.
"""

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .faults import Behavior, FaultConfig
from .monitor import EventMap, MetricSpec
from .protocols import build_model
from .scheduler import DelayDistribution
from .smc import SmcParams

DEFAULT_DELAY = {"family": "lognormal", "mu": -3.0, "sigma": 0.5}
TOP_KEYS = {"model", "delay", "faults", "events", "metric", "horizon", "smc"}
FAULT_TAGS = frozenset(str(b) for b in Behavior)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model_name: str
    model_params: dict = field(default_factory=dict)
    delay: DelayDistribution = field(default_factory=lambda: DelayDistribution.from_dict(DEFAULT_DELAY))
    faults: FaultConfig = field(default_factory=FaultConfig)
    events: Optional[EventMap] = None
    metric: MetricSpec = field(default_factory=lambda: MetricSpec("avg-latency"))
    horizon: Optional[float] = None
    smc: Optional[SmcParams] = None

    def __post_init__(self):
        self._model = None

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()

    @property
    def model(self):
        if self._model is None:
            self._model = build_model(self.model_name, self.model_params)
        return self._model

    @property
    def event_map(self):
        return self.events if self.events is not None else self.model.event_map

    def to_dict(self):
        out = {
            "model": {"name": self.model_name, "params": copy.deepcopy(self.model_params)},
            "delay": self.delay.to_dict(),
            "faults": self.faults.to_dict(),
            "metric": self.metric.to_dict(),
        }
        if self.events is not None:
            out["events"] = self.events.to_dict()
        if self.horizon is not None:
            out["horizon"] = self.horizon
        if self.smc is not None:
            out["smc"] = self.smc.to_dict()
        return out

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls._from_dict(data)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def _from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
        unknown = sorted(set(data) - TOP_KEYS)
        if unknown:
            raise ConfigError(f"config: unknown section(s) {unknown}")
        m = data.get("model")
        if isinstance(m, str):
            m = {"name": m}
        if not isinstance(m, dict) or not isinstance(m.get("name"), str):
            raise ConfigError("model.name: required")
        params = m.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("model.params: expected an object")
        cfg = cls(m["name"], copy.deepcopy(params))
        model = cfg.model

        d = data.get("delay", DEFAULT_DELAY)
        if not isinstance(d, dict):
            raise ConfigError("delay: expected an object")
        try:
            cfg.delay = DelayDistribution.from_dict(d)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"delay: {exc}") from None

        cfg.faults = FaultConfig.from_dict(data.get("faults"))
        cfg.faults.validate(model)

        if "events" in data:
            cfg.events = EventMap.from_dict(data["events"])
            cfg.events.validate(model.labels | FAULT_TAGS)
        if "metric" in data:
            cfg.metric = MetricSpec.from_dict(data["metric"])
        cfg.metric.resolve(model.metrics)

        if data.get("horizon") is not None:
            h = data["horizon"]
            if isinstance(h, bool) or not isinstance(h, (int, float)) or math.isnan(h) or h < 0:
                raise ConfigError(f"horizon: expected a time >= 0, got {h!r}")
            cfg.horizon = float(h)
        elif not model.quiescent:
            raise ConfigError(f"horizon: required for the non-quiescent model {model.name!r}")

        if "smc" in data:
            cfg.smc = SmcParams.from_dict(data["smc"])
        return cfg


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"--config: no such file {path!r}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config: {path}: invalid JSON ({exc})") from None
    return RunConfig.from_dict(data)


def set_path(data, dotted, value):
    """Assign ``value`` at a dotted key path, creating objects as needed."""
    keys = dotted.split(".")
    cur = data
    for k in keys[:-1]:
        if not isinstance(cur.get(k), dict):
            cur[k] = {}
        cur = cur[k]
    cur[keys[-1]] = value
    return data
