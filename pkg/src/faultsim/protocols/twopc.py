"""Two-phase commit, in the simplified single-coordinator form.

The coordinator runs proposals one at a time: ``start`` sends ``prepare``
to every cohort, ``collect`` folds the votes, and the eager ``decision``
rule fires once all votes are in, broadcasting the outcome and queueing the
next ``start`` to itself.

With ``acks=True`` cohorts acknowledge decisions and the coordinator only
moves on after every ack is in, retransmitting on a timer. That variant
makes decision loss visible in latency.
"""

from dataclasses import dataclass, field
from typing import Optional

from ..core import Node, Payload, eager, on
from ..monitor import EventMap
from .base import Model, ModelConfigError, check_keys, param

PARAMS = ("proposals", "votes", "n_proposals", "cohorts", "acks", "retransmit_timeout")

# default two-proposal init: ch1 votes p1 -> T, p2 -> F; ch2 votes p1 -> T, p2 -> T
TWO_PROPOSAL_INIT = {
    "proposals": ["p1", "p2"],
    "votes": {"ch1": {"p1": True, "p2": False}, "ch2": {"p1": True, "p2": True}},
}


@dataclass
class CoordState:
    proposals: list
    cohorts: tuple
    waiting: set = field(default_factory=set)
    results: dict = field(default_factory=dict)
    acks: bool = False
    timeout: float = 1.0
    inflight: Optional[str] = None
    unacked: set = field(default_factory=set)
    decided: dict = field(default_factory=dict)


@dataclass
class CohortState:
    votes: dict
    decisions: dict = field(default_factory=dict)
    acks: bool = False


def _ready_to_decide(node):
    s = node.state
    return bool(s.proposals) and not s.waiting and s.inflight is None and s.proposals[0] in s.results


def _all_acked(node):
    s = node.state
    return s.inflight is not None and not s.unacked


class Coordinator(Node):
    extra_labels = ("stale",)

    def start(self, ctx):
        ctx.send(self.node_id, "start")

    @on("start", label="start")
    def on_start(self, ctx, src, body):
        s = self.state
        if not s.proposals or s.waiting or s.inflight is not None or s.proposals[0] in s.results:
            ctx.fire("stale")
            return
        p = s.proposals[0]
        s.waiting = set(s.cohorts)
        s.results[p] = True
        ctx.subject = p
        for ch in s.cohorts:
            ctx.send(ch, "prepare", p)

    @on("vote", label="collect")
    def collect(self, ctx, src, body):
        p, v = body
        s = self.state
        if not s.proposals or s.proposals[0] != p or src not in s.waiting:
            ctx.fire("stale")
            return
        s.waiting.discard(src)
        s.results[p] = s.results[p] and bool(v)
        ctx.subject = p

    @eager("decision", when=_ready_to_decide)
    def decision(self, ctx):
        s = self.state
        p = s.proposals.pop(0)
        v = s.results[p]
        s.decided[p] = v
        ctx.subject = p
        if s.acks:
            s.inflight = p
            s.unacked = set(s.cohorts)
            ctx.timer(s.timeout, "retransmit", p)
        else:
            ctx.send(self.node_id, "start")
        for ch in s.cohorts:
            ctx.send(ch, "decision", (p, v))

    @on("ack", label="acked")
    def acked(self, ctx, src, body):
        s = self.state
        if body != s.inflight:
            ctx.fire("stale")
            return
        s.unacked.discard(src)
        ctx.subject = body

    @eager("complete", when=_all_acked)
    def complete(self, ctx):
        s = self.state
        ctx.subject = s.inflight
        s.inflight = None
        ctx.send(self.node_id, "start")

    @on("retransmit", label="retransmit")
    def retransmit(self, ctx, src, body):
        s = self.state
        if body != s.inflight or not s.unacked:
            ctx.fire("stale")
            return
        ctx.subject = body
        for ch in sorted(s.unacked):
            ctx.send(ch, "decision", (body, s.decided[body]))
        ctx.timer(s.timeout, "retransmit", body)


class Cohort(Node):
    @on("prepare", label="vote")
    def vote(self, ctx, src, body):
        ctx.subject = body
        ctx.send(src, "vote", (body, self.state.votes[body]))

    @on("decision", label="log")
    def log(self, ctx, src, body):
        p, v = body
        self.state.decisions[p] = v
        ctx.subject = p
        if self.state.acks:
            ctx.send(src, "ack", p)


def flip_vote(payload, rng):
    if payload.kind == "vote":
        p, v = payload.body
        return Payload("vote", (p, not v))
    return payload


def flip_decision(payload, dst, rng):
    if payload.kind == "decision":
        p, v = payload.body
        # cohorts with an odd index see the opposite outcome
        if int("".join(ch for ch in dst if ch.isdigit()) or 0) % 2:
            return Payload("decision", (p, not v))
    return payload


def _coerce_votes(votes, proposals, path):
    if not isinstance(votes, dict) or not votes:
        raise ModelConfigError(f"{path}.votes: expected at least one cohort vote table")
    out = {}
    for ch, table in votes.items():
        if not isinstance(table, dict):
            raise ModelConfigError(f"{path}.votes.{ch}: expected proposal -> bool")
        for p in proposals:
            if p not in table:
                raise ModelConfigError(f"{path}.votes.{ch}: missing vote for {p!r}")
            if not isinstance(table[p], bool):
                raise ModelConfigError(f"{path}.votes.{ch}.{p}: expected a boolean")
        out[ch] = dict(table)
    return out


def build_2pc(params=None, path="model.params"):
    params = dict(TWO_PROPOSAL_INIT if params is None else params)
    check_keys(params, PARAMS, path)
    if "n_proposals" in params:
        n = param(params, "n_proposals", 1, int, path, lambda v: v >= 1, "need at least one proposal")
        cohorts = param(params, "cohorts", 2, int, path, lambda v: v >= 1, "need at least one cohort")
        proposals = [f"p{i + 1}" for i in range(n)]
        votes = params.get("votes") or {f"ch{j + 1}": {p: True for p in proposals} for j in range(cohorts)}
    else:
        proposals = params.get("proposals", TWO_PROPOSAL_INIT["proposals"])
        votes = params.get("votes", TWO_PROPOSAL_INIT["votes"])
    if not isinstance(proposals, list) or not proposals or not all(isinstance(p, str) for p in proposals):
        raise ModelConfigError(f"{path}.proposals: expected a nonempty list of ids")
    if len(set(proposals)) != len(proposals):
        raise ModelConfigError(f"{path}.proposals: duplicate proposal ids")
    votes = _coerce_votes(votes, proposals, path)
    if "c" in votes:
        raise ModelConfigError(f"{path}.votes: 'c' is reserved for the coordinator")
    acks = param(params, "acks", False, bool, path)
    timeout = param(params, "retransmit_timeout", 1.0, float, path, lambda v: v > 0, "must be > 0")
    cohorts = tuple(sorted(votes))

    def factory():
        nodes = {"c": Coordinator("c", CoordState(list(proposals), cohorts, acks=acks, timeout=timeout))}
        for ch in cohorts:
            nodes[ch] = Cohort(ch, CohortState(dict(votes[ch]), acks=acks))
        return nodes

    finish = "complete" if acks else "decision"
    return Model(
        name="2pc",
        params=params,
        factory=factory,
        event_map=EventMap({"start": "propose", finish: "finish"}),
        tamper_presets={"flip-vote": flip_vote},
        equiv_presets={"flip-decision": flip_decision},
    )
