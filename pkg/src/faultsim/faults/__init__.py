from .behaviors import DESCRIPTIONS, LEVELS, Behavior, parse_behavior, priority_map
from .control import Authorize, ControllerState, Release, control, is_satisfied
from .handlers import (
    HEALTHY,
    PARTITIONED,
    CrashState,
    CrashTarget,
    DelayConfig,
    Drop,
    DupConfig,
    EnvChangedRecheck,
    EquivSpec,
    HandlerStates,
    ModifiedRecheck,
    MsgLossConfig,
    PartitionError,
    PartitionState,
    Reschedule,
    TamperSpec,
    Target,
    handle,
    random_part,
)
from .config import FaultConfig, FaultConfigError

__all__ = [
    "Authorize",
    "Behavior",
    "ControllerState",
    "CrashState",
    "CrashTarget",
    "DESCRIPTIONS",
    "DelayConfig",
    "Drop",
    "DupConfig",
    "EnvChangedRecheck",
    "EquivSpec",
    "FaultConfig",
    "FaultConfigError",
    "HEALTHY",
    "HandlerStates",
    "LEVELS",
    "ModifiedRecheck",
    "MsgLossConfig",
    "PARTITIONED",
    "PartitionError",
    "PartitionState",
    "Release",
    "Reschedule",
    "TamperSpec",
    "Target",
    "control",
    "handle",
    "is_satisfied",
    "parse_behavior",
    "priority_map",
    "random_part",
]
