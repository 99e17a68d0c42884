"""Raft at election granularity: terms, votes, heartbeats; no log.

Election and heartbeat timers are self-messages carrying an epoch. Any
state change that resets the election timer bumps the epoch, so older
timers arrive as no-ops instead of being cancelled.
"""

from dataclasses import dataclass, field
from typing import Optional

from ..core import Node, on
from ..monitor import EventMap
from .base import Model, ModelConfigError, check_keys, param

FOLLOWER, CANDIDATE, LEADER = "follower", "candidate", "leader"
PARAMS = ("n", "timeout_min", "timeout_max", "heartbeat")


@dataclass
class RaftState:
    peers: tuple
    tmin: float
    tmax: float
    heartbeat: float
    term: int = 0
    role: str = FOLLOWER
    voted_for: Optional[str] = None
    votes: set = field(default_factory=set)
    epoch: int = 0
    leader: Optional[str] = None


class RaftNode(Node):
    extra_labels = ("stale", "elected")

    def _arm_election(self, ctx):
        s = self.state
        s.epoch += 1
        wait = s.tmin + (s.tmax - s.tmin) * ctx.rng.random()
        ctx.timer(wait, "election_timeout", s.epoch)

    def _step_down(self, term):
        s = self.state
        s.term = term
        s.role = FOLLOWER
        s.voted_for = None
        s.votes = set()

    def start(self, ctx):
        self._arm_election(ctx)

    def on_reboot(self, ctx):
        s = self.state
        s.role = FOLLOWER
        s.leader = None
        self._arm_election(ctx)

    @on("election_timeout", label="timeout")
    def timeout(self, ctx, src, epoch):
        s = self.state
        if epoch != s.epoch or s.role == LEADER:
            ctx.fire("stale")
            return
        s.term += 1
        s.role = CANDIDATE
        s.voted_for = self.node_id
        s.votes = {self.node_id}
        s.leader = None
        ctx.subject = s.term
        for peer in s.peers:
            ctx.send(peer, "request_vote", s.term)
        self._arm_election(ctx)

    @on("request_vote", label="vote")
    def vote(self, ctx, src, term):
        s = self.state
        if term > s.term:
            self._step_down(term)
        granted = term == s.term and s.voted_for in (None, src)
        if granted:
            s.voted_for = src
            self._arm_election(ctx)
        ctx.subject = term
        ctx.send(src, "vote_reply", (s.term, granted))

    @on("vote_reply", label="tally")
    def tally(self, ctx, src, body):
        term, granted = body
        s = self.state
        if term > s.term:
            self._step_down(term)
            self._arm_election(ctx)
            return
        if s.role != CANDIDATE or term != s.term or not granted:
            return
        s.votes.add(src)
        if 2 * len(s.votes) > len(s.peers) + 1:
            s.role = LEADER
            s.leader = self.node_id
            s.epoch += 1
            ctx.fire("elected", s.term)
            for peer in s.peers:
                ctx.send(peer, "append", s.term)
            ctx.timer(s.heartbeat, "heartbeat_timer", s.epoch)

    @on("heartbeat_timer", label="heartbeat")
    def heartbeat(self, ctx, src, epoch):
        s = self.state
        if s.role != LEADER or epoch != s.epoch:
            ctx.fire("stale")
            return
        ctx.subject = s.term
        for peer in s.peers:
            ctx.send(peer, "append", s.term)
        ctx.timer(s.heartbeat, "heartbeat_timer", s.epoch)

    @on("append", label="follow")
    def follow(self, ctx, src, term):
        s = self.state
        if term < s.term:
            ctx.fire("stale")
            return
        if term > s.term or s.role != FOLLOWER:
            self._step_down(term)
            s.voted_for = src
        s.leader = src
        ctx.subject = term
        self._arm_election(ctx)


def current_leader(nodes):
    """Live leader of the highest term, if any."""
    best = None
    for nid in sorted(nodes):
        node = nodes[nid]
        if node.crashed or node.state.role != LEADER:
            continue
        if best is None or node.state.term > nodes[best].state.term:
            best = nid
    return best


def build_raft_election(params=None, path="model.params"):
    params = dict(params or {})
    check_keys(params, PARAMS, path)
    n = param(params, "n", 5, int, path, lambda v: v >= 1, "need at least one node")
    tmin = param(params, "timeout_min", 1.5, float, path, lambda v: v > 0, "must be > 0")
    tmax = param(params, "timeout_max", 3.0, float, path, lambda v: v > 0, "must be > 0")
    hb = param(params, "heartbeat", 0.5, float, path, lambda v: v > 0, "must be > 0")
    if tmin > tmax:
        raise ModelConfigError(f"{path}.timeout_min: degenerate timeout range ({tmin} > {tmax})")
    if hb >= tmin:
        raise ModelConfigError(f"{path}.heartbeat: must be shorter than timeout_min")
    ids = tuple(f"n{i + 1}" for i in range(n))

    def factory():
        return {
            nid: RaftNode(nid, RaftState(tuple(p for p in ids if p != nid), tmin, tmax, hb))
            for nid in ids
        }

    return Model(
        name="raft",
        params=params,
        factory=factory,
        event_map=EventMap({"elected": "leader-elected", "crash-msg": "crash", "crash-time": "crash"}),
        symbols={"@leader": current_leader},
        quiescent=False,
    )


def elected_terms(trace):
    """``{term: set of nodes}`` that won an election, from a run trace."""
    out = {}
    for e in trace:
        if e.kind == "fire" and e.label == "elected":
            out.setdefault(e.subject, set()).add(e.node)
    return out
