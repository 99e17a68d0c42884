"""Minimal single-proposer protocol used to exercise equivocation.

Each round the proposer broadcasts ``proposal(r, v)``; acceptors record
the value and echo it back; the proposer commits a round once a majority
echoed its own value.
"""

from dataclasses import dataclass, field

from ..core import Node, Payload, on
from ..monitor import EventMap
from .base import Model, check_keys, param

PARAMS = ("acceptors", "rounds", "interval")


@dataclass
class ProposerState:
    acceptors: tuple
    rounds: int
    interval: float
    round: int = 0
    values: dict = field(default_factory=dict)
    matching: dict = field(default_factory=dict)
    committed: list = field(default_factory=list)


@dataclass
class AcceptorState:
    accepted: dict = field(default_factory=dict)


class Proposer(Node):
    extra_labels = ("commit",)

    def start(self, ctx):
        ctx.timer(0.0, "next_round")

    @on("next_round", label="propose")
    def propose(self, ctx, src, body):
        s = self.state
        s.round += 1
        r = s.round
        s.values[r] = f"v{r}"
        s.matching[r] = set()
        ctx.subject = r
        for a in s.acceptors:
            ctx.send(a, "proposal", (r, s.values[r]))
        if r < s.rounds:
            ctx.timer(s.interval, "next_round")

    @on("accepted", label="tally")
    def tally(self, ctx, src, body):
        r, v = body
        s = self.state
        ctx.subject = r
        if r in s.committed or v != s.values.get(r):
            return
        s.matching[r].add(src)
        if 2 * len(s.matching[r]) > len(s.acceptors):
            s.committed.append(r)
            ctx.fire("commit", r)


class Acceptor(Node):
    @on("proposal", label="accept")
    def accept(self, ctx, src, body):
        r, v = body
        self.state.accepted.setdefault(r, v)
        ctx.subject = r
        ctx.send(src, "accepted", (r, v))


def _index(node_id):
    digits = "".join(ch for ch in node_id if ch.isdigit())
    return int(digits) if digits else 0


def conflicting_proposal(payload, dst, rng):
    """Even-indexed acceptors get the honest value, odd ones a conflicting one."""
    if payload.kind != "proposal":
        return payload
    r, v = payload.body
    if _index(dst) % 2:
        return Payload("proposal", (r, f"{v}'"))
    return payload


def random_proposal(payload, dst, rng):
    if payload.kind != "proposal":
        return payload
    r, _ = payload.body
    return Payload("proposal", (r, f"x{rng.below(1 << 30)}"))


def corrupt_value(payload, rng):
    if payload.kind in ("proposal", "accepted"):
        r, v = payload.body
        return Payload(payload.kind, (r, f"{v}#"))
    return payload


def build_toy_leader(params=None, path="model.params"):
    params = dict(params or {})
    check_keys(params, PARAMS, path)
    n = param(params, "acceptors", 3, int, path, lambda v: v >= 1, "need at least one acceptor")
    rounds = param(params, "rounds", 5, int, path, lambda v: v >= 1, "need at least one round")
    interval = param(params, "interval", 1.0, float, path, lambda v: v > 0, "must be > 0")
    acceptors = tuple(f"a{i + 1}" for i in range(n))

    def factory():
        nodes = {"p": Proposer("p", ProposerState(acceptors, rounds, interval))}
        for a in acceptors:
            nodes[a] = Acceptor(a, AcceptorState())
        return nodes

    return Model(
        name="toy-leader",
        params=params,
        factory=factory,
        event_map=EventMap({"propose": "propose", "commit": "finish"}),
        tamper_presets={"corrupt-value": corrupt_value},
        equiv_presets={"conflicting-proposal": conflicting_proposal, "random-proposal": random_proposal},
    )
