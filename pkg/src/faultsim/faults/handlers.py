"""Handler state for each fault type and the code that executes a behavior.

A handler turns an authorized (behavior, envelope) pair into one of four
outcomes: the envelope is modified and rechecked, rescheduled, dropped, or
left unchanged while the environment (partition, crashed set) changes.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..core import Envelope, NodeId, SimulationError
from .behaviors import Behavior as B

HEALTHY = "healthy"
PARTITIONED = "partitioned"


class PartitionError(SimulationError):
    pass


@dataclass(frozen=True)
class Target:
    """Envelope filter; a ``None`` field matches anything."""

    labels: Optional[frozenset] = None
    src: Optional[frozenset] = None
    dst: Optional[frozenset] = None
    kinds: Optional[frozenset] = None

    def matches(self, env):
        return (
            (self.labels is None or env.label in self.labels)
            and (self.src is None or env.src in self.src)
            and (self.dst is None or env.dst in self.dst)
            and (self.kinds is None or env.payload.kind in self.kinds)
        )

    @classmethod
    def from_dict(cls, data):
        if data is None:
            return None
        unknown = set(data) - {"labels", "src", "dst", "kinds"}
        if unknown:
            raise ValueError(f"unknown target field(s) {sorted(unknown)}")

        def as_set(key):
            value = data.get(key)
            if value is None:
                return None
            if isinstance(value, str):
                value = [value]
            return frozenset(value)

        return cls(as_set("labels"), as_set("src"), as_set("dst"), as_set("kinds"))

    def to_dict(self):
        out = {}
        for key in ("labels", "src", "dst", "kinds"):
            value = getattr(self, key)
            if value is not None:
                out[key] = sorted(value)
        return out


@dataclass
class MsgLossConfig:
    rate: float
    rules: frozenset
    receivers: frozenset


@dataclass
class PartitionState:
    all_nodes: tuple
    parts: Optional[tuple] = None  # configured sides, or None for a random split
    occur_time: Optional[float] = None
    duration: Optional[float] = None
    split_on: Optional[Target] = None
    heal_on: Optional[Target] = None
    status: str = HEALTHY
    sides: Optional[tuple] = None
    onset_done: bool = False

    def crosses(self, src, dst):
        if self.status != PARTITIONED:
            return False
        a, b = self.sides
        return (src in a and dst in b) or (src in b and dst in a)


@dataclass
class CrashTarget:
    node: str  # a NodeId, or a symbolic name such as "@leader"
    crash_time: Optional[float] = None
    reboot_time: Optional[float] = None
    crash_on: Optional[Target] = None
    reboot_on: Optional[Target] = None
    resolved: Optional[NodeId] = None
    crash_done: bool = False
    reboot_done: bool = False


@dataclass
class CrashState:
    targets: list
    amnesia: bool = False
    crashed: set = field(default_factory=set)
    resolver: Callable = lambda name: name

    def resolve(self, target):
        if target.resolved is not None:
            return target.resolved
        if target.node.startswith("@"):
            return self.resolver(target.node)
        return target.node

    def can_crash(self, target):
        if target.crash_done:
            return False
        node = self.resolve(target)
        return node is not None and node not in self.crashed

    def can_reboot(self, target):
        return target.crash_done and not target.reboot_done and target.resolved in self.crashed


@dataclass
class TamperSpec:
    target: Target
    transform: Callable  # (payload, rng) -> payload
    name: str = "custom"
    rate: float = 1.0


@dataclass
class EquivSpec:
    senders: frozenset
    variant: Callable  # (payload, dst, rng) -> payload
    labels: Optional[frozenset] = None
    name: str = "custom"
    rate: float = 1.0

    def matches(self, env):
        return env.src in self.senders and (self.labels is None or env.label in self.labels)


@dataclass
class DupConfig:
    target: Target
    copies: int = 1
    rate: float = 1.0


@dataclass
class DelayConfig:
    target: Target
    extra: Any  # DelayDistribution
    rate: float = 1.0


@dataclass
class HandlerStates:
    network_delay: Any = None
    msg_loss: Optional[MsgLossConfig] = None
    partition: Optional[PartitionState] = None
    crash: Optional[CrashState] = None
    tampering: Optional[TamperSpec] = None
    equivocation: Optional[EquivSpec] = None
    duplication: Optional[DupConfig] = None
    abnormal_delay: Optional[DelayConfig] = None


# outcomes -----------------------------------------------------------------


@dataclass
class ModifiedRecheck:
    env: Envelope


@dataclass
class Reschedule:
    envelopes: list


@dataclass
class Drop:
    behavior: B


@dataclass
class EnvChangedRecheck:
    env: Envelope
    reschedule: list = field(default_factory=list)
    crashed: Optional[NodeId] = None
    rebooted: Optional[NodeId] = None


def random_part(nodes, rng):
    """Split ``nodes`` into two nonempty sides.

    Each node, in sorted order, goes to the first side on a fair coin. If a
    side ends up empty the lowest-ordered node is moved across.
    """
    nodes = sorted(nodes)
    if len(nodes) < 2:
        raise PartitionError(f"partition impossible with {len(nodes)} node(s)")
    first, second = [], []
    for node in nodes:
        (first if rng.coin() else second).append(node)
    if not first:
        first.append(second.pop(0))
    elif not second:
        second.append(first.pop(0))
    return frozenset(first), frozenset(second)


def _start_partition(part, rng):
    part.status = PARTITIONED
    part.sides = part.parts if part.parts is not None else random_part(part.all_nodes, rng)


def handle(behavior, env, states, rng, clock):
    """Execute ``behavior`` on ``env``; mutates ``states`` and returns the outcome."""
    b = behavior
    if b in (B.MSG_LOSS, B.PART_DROP, B.CRASH_DROP):
        return Drop(b)

    if b is B.TAMPERING:
        spec = states.tampering
        return ModifiedRecheck(env.copy(payload=spec.transform(env.payload, rng)).with_applied(b))

    if b is B.EQUIVOCATION:
        spec = states.equivocation
        return ModifiedRecheck(env.copy(payload=spec.variant(env.payload, env.dst, rng)).with_applied(b))

    if b is B.DUPLICATION:
        spec = states.duplication
        copies = []
        for _ in range(spec.copies):
            delay = states.network_delay.sample(rng)
            copies.append(env.copy(arrival=clock + delay, applied=frozenset(), duplicate=True))
        return EnvChangedRecheck(env.with_applied(b), reschedule=copies)

    if b is B.ABNORMAL_DELAY:
        extra = states.abnormal_delay.extra.sample(rng)
        return Reschedule([env.copy(arrival=clock + extra).with_applied(b)])

    part = states.partition
    if b is B.PART_TIME:
        part.onset_done = True
        _start_partition(part, rng)
        return EnvChangedRecheck(env)
    if b is B.PART_MSG:
        part.occur_time = clock
        _start_partition(part, rng)
        return EnvChangedRecheck(env.with_applied(b))
    if b in (B.RECOVER_TIME, B.RECOVER_MSG):
        part.status = HEALTHY
        part.sides = None
        return EnvChangedRecheck(env if b is B.RECOVER_TIME else env.with_applied(b))

    crash = states.crash
    if b in (B.CRASH_TIME, B.CRASH_MSG):
        target = _first(crash.targets, lambda t: crash.can_crash(t) and _crash_trigger(b, t, env, clock))
        node = crash.resolve(target)
        target.resolved = node
        target.crash_done = True
        crash.crashed.add(node)
        out = env if b is B.CRASH_TIME else env.with_applied(b)
        return EnvChangedRecheck(out, crashed=node)
    if b in (B.REBOOT_TIME, B.REBOOT_MSG):
        target = _first(crash.targets, lambda t: crash.can_reboot(t) and _reboot_trigger(b, t, env, clock))
        target.reboot_done = True
        crash.crashed.discard(target.resolved)
        out = env if b is B.REBOOT_TIME else env.with_applied(b)
        return EnvChangedRecheck(out, rebooted=target.resolved)

    raise SimulationError(f"no handler for {b}")


def _first(items, pred):
    for item in items:
        if pred(item):
            return item
    raise SimulationError("authorized behavior has no eligible target")


def _crash_trigger(b, target, env, clock):
    if b is B.CRASH_TIME:
        return target.crash_time is not None and clock >= target.crash_time
    return target.crash_on is not None and target.crash_on.matches(env)


def _reboot_trigger(b, target, env, clock):
    if b is B.REBOOT_TIME:
        return target.reboot_time is not None and clock >= target.reboot_time
    return target.reboot_on is not None and target.reboot_on.matches(env)
