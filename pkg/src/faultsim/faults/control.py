"""Fault controller: which enabled behavior, if any, acts on an envelope."""

from dataclasses import dataclass, field

from ..core import Envelope
from .behaviors import GUARDED, LEVELS
from .behaviors import Behavior as B
from .handlers import HEALTHY, PARTITIONED, _crash_trigger, _reboot_trigger


@dataclass
class ControllerState:
    behaviors: tuple
    priority: dict = field(default_factory=dict)

    def __post_init__(self):
        self.behaviors = tuple(B(b) for b in self.behaviors)
        # levels are fixed; a caller-supplied map is ignored on purpose
        self.priority = {b: LEVELS[b] for b in self.behaviors}


@dataclass(frozen=True)
class Authorize:
    behavior: B
    env: Envelope
    eligible: tuple = ()


@dataclass(frozen=True)
class Release:
    env: Envelope
    eligible: tuple = ()


def _gate(rate, rng):
    # no draw for certain behaviors so that rate=1 configs do not shift the stream
    return rate >= 1.0 or rng.random() < rate


def is_satisfied(b, env, states, rng):
    """Eligibility predicate for one behavior.

    The clock is the envelope's arrival time, which the scheduler has just
    made current. Rate-gated behaviors draw from ``rng`` only once their
    structural conditions hold.
    """
    if b in GUARDED and b in env.applied:
        return False
    now = env.arrival

    if b is B.MSG_LOSS:
        ml = states.msg_loss
        return env.dst in ml.receivers and env.label in ml.rules and rng.random() < ml.rate
    if b is B.TAMPERING:
        spec = states.tampering
        return spec.target.matches(env) and _gate(spec.rate, rng)
    if b is B.EQUIVOCATION:
        spec = states.equivocation
        return spec.matches(env) and _gate(spec.rate, rng)
    if b is B.DUPLICATION:
        spec = states.duplication
        return not env.duplicate and spec.target.matches(env) and _gate(spec.rate, rng)
    if b is B.ABNORMAL_DELAY:
        spec = states.abnormal_delay
        return spec.target.matches(env) and _gate(spec.rate, rng)

    part = states.partition
    if b is B.PART_TIME:
        return (
            not part.onset_done
            and part.occur_time is not None
            and now >= part.occur_time
            and part.status == HEALTHY
        )
    if b is B.RECOVER_TIME:
        return (
            part.status == PARTITIONED
            and part.duration is not None
            and now >= part.occur_time + part.duration
        )
    if b is B.PART_MSG:
        return part.status == HEALTHY and part.split_on is not None and part.split_on.matches(env)
    if b is B.RECOVER_MSG:
        return part.status == PARTITIONED and part.heal_on is not None and part.heal_on.matches(env)
    if b is B.PART_DROP:
        return part.crosses(env.src, env.dst)

    crash = states.crash
    if b is B.CRASH_DROP:
        return env.dst in crash.crashed
    if b in (B.CRASH_TIME, B.CRASH_MSG):
        return any(crash.can_crash(t) and _crash_trigger(b, t, env, now) for t in crash.targets)
    if b in (B.REBOOT_TIME, B.REBOOT_MSG):
        return any(crash.can_reboot(t) and _reboot_trigger(b, t, env, now) for t in crash.targets)

    raise ValueError(f"unknown behavior {b!r}")


def control(ctrl, env, states, rng):
    """Authorize the highest-priority eligible behavior, or release ``env``.

    All behaviors are evaluated in declaration order (so every rate draw
    happens on every pass); ties within the best level are broken with one
    uniform draw.
    """
    eligible = tuple(b for b in ctrl.behaviors if is_satisfied(b, env, states, rng))
    if not eligible:
        return Release(env)
    best = min(ctrl.priority[b] for b in eligible)
    top = [b for b in eligible if ctrl.priority[b] == best]
    chosen = top[0] if len(top) == 1 else top[rng.below(len(top))]
    return Authorize(chosen, env, eligible)
