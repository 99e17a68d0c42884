"""Actors, messages and the deterministic single-step semantics.

A protocol node is a ``Node`` subclass whose transitions are methods tagged
with :func:`on` (message-triggered) or :func:`eager` (object-triggered)::

    class Cohort(Node):
        @on("prepare", label="vote")
        def vote(self, ctx, src, body):
            ctx.send(src, "vote", (body, self.state.votes[body]))

Exactly one ``on`` rule exists per payload kind, and at most one ``eager``
guard may hold at a time. Every message a rule emits carries that rule's
label; the label is what fault filters and event maps key on.
"""

import copy
from dataclasses import dataclass, field, replace
from typing import Any, Optional

NodeId = str


class SimulationError(RuntimeError):
    """A model or engine contract was broken during a run."""


class NoApplicableTransition(SimulationError):
    pass


class EagerAmbiguity(SimulationError):
    pass


class GuardViolation(SimulationError):
    pass


@dataclass(frozen=True)
class Payload:
    kind: str
    body: Any = None


@dataclass(frozen=True)
class Emission:
    """An outgoing message before the scheduler stamps it.

    ``after`` turns the message into a timer: it arrives exactly ``after``
    time units later instead of after a sampled network delay.
    """

    label: str
    src: NodeId
    dst: NodeId
    payload: Payload
    after: Optional[float] = None


@dataclass(frozen=True)
class Envelope:
    arrival: float
    src: NodeId
    dst: NodeId
    payload: Payload
    label: str
    applied: frozenset = frozenset()
    seq: int = 0
    # set on copies produced by the duplication handler
    duplicate: bool = False

    def with_applied(self, behavior):
        return replace(self, applied=self.applied | {behavior})

    def copy(self, **changes):
        env = replace(self, **changes)
        return replace(env, payload=copy.deepcopy(env.payload))


@dataclass
class Firing:
    """What one rule application produced."""

    node_id: NodeId
    label: str
    subject: Any = None
    emissions: list = field(default_factory=list)


class Context:
    """Handed to a rule while it fires.

    Rules read ``now`` and ``rng``, emit with :meth:`send`, and may switch
    their own label with :meth:`fire` when a conditional branch corresponds
    to a distinct transition (for example ``tally`` becoming ``elected``).
    """

    __slots__ = ("node_id", "now", "rng", "label", "subject", "emissions")

    def __init__(self, node_id, now, rng, label):
        self.node_id = node_id
        self.now = now
        self.rng = rng
        self.label = label
        self.subject = None
        self.emissions = []

    def fire(self, label, subject=None):
        self.label = label
        if subject is not None:
            self.subject = subject

    def send(self, dst, kind, body=None, after=None):
        self.emissions.append((dst, Payload(kind, body), after))

    def timer(self, after, kind, body=None):
        self.emissions.append((self.node_id, Payload(kind, body), after))

    def result(self):
        label = self.label
        src = self.node_id
        out = [Emission(label, src, dst, payload, after) for dst, payload, after in self.emissions]
        return Firing(src, label, self.subject, out)


def on(kind, label):
    """Mark a method as the delivery rule for payloads of ``kind``."""

    def deco(fn):
        fn._faultsim_on = (kind, label)
        return fn

    return deco


def eager(label, when):
    """Mark a method as an object-triggered rule enabled while ``when(self)``."""

    def deco(fn):
        fn._faultsim_eager = (label, when)
        return fn

    return deco


class Node:
    """Base class for protocol actors.

    Subclasses keep all protocol data in ``self.state`` so that amnesia
    reboots can restore it and purity checks can compare it.
    """

    _rules: dict = {}
    _eager: tuple = ()

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        rules = {}
        eagers = []
        for klass in reversed(cls.__mro__):
            for name, attr in vars(klass).items():
                if hasattr(attr, "_faultsim_on"):
                    kind, label = attr._faultsim_on
                    rules[kind] = (name, label)
                if hasattr(attr, "_faultsim_eager"):
                    label, when = attr._faultsim_eager
                    eagers = [e for e in eagers if e[0] != name] + [(name, label, when)]
        cls._rules = rules
        cls._eager = tuple(eagers)

    def __init__(self, node_id, state):
        self.node_id = node_id
        self.state = state
        self.crashed = False
        self._initial = copy.deepcopy(state)

    @classmethod
    def rule_labels(cls):
        labels = {label for _, label in cls._rules.values()}
        labels.update(label for _, label, _ in cls._eager)
        labels.update(getattr(cls, "extra_labels", ()))
        return labels

    def start(self, ctx):
        """Called once at time 0, before the first tick. Default: nothing."""

    def on_reboot(self, ctx):
        """Called right after a reboot fault. Default: nothing."""

    def reset(self):
        self.state = copy.deepcopy(self._initial)

    def enabled_eager(self):
        return [(name, label) for name, label, when in self._eager if when(self)]

    def __repr__(self):
        return f"{type(self).__name__}({self.node_id!r}, {self.state!r})"


def deliver(node, env, now, rng):
    """Apply the unique delivery rule of ``node`` for ``env.payload``."""
    if node.node_id != env.dst:
        raise SimulationError(f"envelope for {env.dst!r} delivered to {node.node_id!r}")
    if node.crashed:
        raise SimulationError(f"delivery to crashed node {node.node_id!r}")
    try:
        name, label = node._rules[env.payload.kind]
    except KeyError:
        raise NoApplicableTransition(
            f"no applicable transition: {node.node_id!r} has no rule for {env.payload.kind!r}"
        ) from None
    ctx = Context(node.node_id, now, rng, label)
    getattr(node, name)(ctx, env.src, env.payload.body)
    return ctx.result()


def eager_step(node, now, rng):
    """Fire the node's enabled object-triggered rule, or return None."""
    if node.crashed:
        return None
    enabled = node.enabled_eager()
    if not enabled:
        return None
    if len(enabled) > 1:
        labels = ", ".join(label for _, label in enabled)
        raise EagerAmbiguity(f"eager ambiguity at {node.node_id!r}: {labels}")
    name, label = enabled[0]
    ctx = Context(node.node_id, now, rng, label)
    getattr(node, name)(ctx)
    return ctx.result()


def any_eager_enabled(nodes):
    """True iff a live node has an object-triggered rule ready to fire."""
    for node in nodes:
        if not node.crashed and node._eager and node.enabled_eager():
            return True
    return False


def start_node(node, rng):
    ctx = Context(node.node_id, 0.0, rng, "init")
    node.start(ctx)
    return ctx.result()


def reboot_node(node, now, rng):
    ctx = Context(node.node_id, now, rng, "reboot")
    node.on_reboot(ctx)
    return ctx.result()
