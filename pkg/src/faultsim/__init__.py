"""Discrete-event, actor-based simulation of distributed protocols under injected faults."""

from .config import ConfigError, RunConfig, load_config
from .core import (
    Context,
    EagerAmbiguity,
    Emission,
    Envelope,
    GuardViolation,
    NoApplicableTransition,
    Node,
    Payload,
    SimulationError,
    eager,
    on,
)
from .engine import Counters, RunResult, Simulation, TraceEntry, simulate
from .faults import Behavior, FaultConfig, FaultConfigError
from .monitor import EventMap, MetricError, MetricSpec, TimedEventLog, avg_latency, throughput
from .protocols import Model, build_model
from .rng import BACKEND, Rng, derive_seed
from .scheduler import DelayDistribution, Scheduler
from .smc import Estimate, SmcParams, estimate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Behavior",
    "ConfigError",
    "Context",
    "Counters",
    "DelayDistribution",
    "EagerAmbiguity",
    "Emission",
    "Envelope",
    "Estimate",
    "EventMap",
    "FaultConfig",
    "FaultConfigError",
    "GuardViolation",
    "MetricError",
    "MetricSpec",
    "Model",
    "NoApplicableTransition",
    "Node",
    "Payload",
    "Rng",
    "RunConfig",
    "RunResult",
    "Scheduler",
    "Simulation",
    "SimulationError",
    "SmcParams",
    "TimedEventLog",
    "TraceEntry",
    "avg_latency",
    "build_model",
    "derive_seed",
    "eager",
    "estimate",
    "load_config",
    "on",
    "simulate",
    "throughput",
]
