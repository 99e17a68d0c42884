"""Quorum replication: one client, N replicas, read quorum R and write quorum W.

The client issues one operation every ``1/load`` time units, the first at
``1/load``, ``floor(duration * load)`` in total. Each operation goes to all replicas and succeeds once R (or W)
acks are in; if the per-operation timer fires first it fails.
"""

import math
from dataclasses import dataclass, field

from ..core import Node, on
from ..monitor import EventMap
from .base import Model, ModelConfigError, check_keys, param

PARAMS = ("n", "R", "W", "load", "duration", "read_ratio", "op_timeout")


@dataclass
class ClientState:
    replicas: tuple
    r: int
    w: int
    interval: float
    n_ops: int
    read_ratio: float
    op_timeout: float
    next_op: int = 0
    version: int = 0
    pending: dict = field(default_factory=dict)  # op id -> [kind, needed, acked set]
    done: dict = field(default_factory=dict)  # op id -> "ok" | "failed"
    reads: dict = field(default_factory=dict)  # op id -> highest version seen


@dataclass
class ReplicaState:
    version: int = 0
    value: object = None


class Client(Node):
    extra_labels = ("stale", "complete")

    def start(self, ctx):
        ctx.timer(self.state.interval, "issue")

    @on("issue", label="issue")
    def issue(self, ctx, src, body):
        s = self.state
        k = s.next_op
        s.next_op += 1
        if ctx.rng.random() < s.read_ratio:
            s.pending[k] = ["read", s.r, set()]
            s.reads[k] = -1
            for rep in s.replicas:
                ctx.send(rep, "read", k)
        else:
            s.version += 1
            s.pending[k] = ["write", s.w, set()]
            for rep in s.replicas:
                ctx.send(rep, "write", (k, s.version, f"v{s.version}"))
        ctx.subject = k
        ctx.timer(s.op_timeout, "op_timeout", k)
        if s.next_op < s.n_ops:
            ctx.timer(s.interval, "issue")

    def _ack(self, ctx, src, k):
        s = self.state
        op = s.pending.get(k)
        if op is None:
            ctx.fire("stale")
            return
        op[2].add(src)
        ctx.subject = k
        if len(op[2]) >= op[1]:
            del s.pending[k]
            s.done[k] = "ok"
            ctx.fire("complete", k)

    @on("read_ack", label="ack")
    def read_ack(self, ctx, src, body):
        k, version, _ = body
        if k in self.state.reads:
            self.state.reads[k] = max(self.state.reads[k], version)
        self._ack(ctx, src, k)

    @on("write_ack", label="ack")
    def write_ack(self, ctx, src, body):
        self._ack(ctx, src, body)

    @on("op_timeout", label="expire")
    def expire(self, ctx, src, k):
        s = self.state
        if k not in s.pending:
            ctx.fire("stale")
            return
        del s.pending[k]
        s.done[k] = "failed"
        ctx.subject = k


class Replica(Node):
    @on("read", label="serve-read")
    def serve_read(self, ctx, src, k):
        ctx.send(src, "read_ack", (k, self.state.version, self.state.value))

    @on("write", label="apply-write")
    def apply_write(self, ctx, src, body):
        k, version, value = body
        if version > self.state.version:
            self.state.version = version
            self.state.value = value
        ctx.send(src, "write_ack", k)


def stale_value(payload, rng):
    if payload.kind == "read_ack":
        k, _, _ = payload.body
        return type(payload)("read_ack", (k, 0, None))
    return payload


def build_quorum(params=None, path="model.params"):
    params = dict(params or {})
    check_keys(params, PARAMS, path)
    n = param(params, "n", 3, int, path, lambda v: v >= 1, "need at least one replica")
    r = param(params, "R", 2, int, path, lambda v: 1 <= v, "must be >= 1")
    w = param(params, "W", 2, int, path, lambda v: 1 <= v, "must be >= 1")
    if r > n:
        raise ModelConfigError(f"{path}.R: read quorum {r} exceeds N={n}")
    if w > n:
        raise ModelConfigError(f"{path}.W: write quorum {w} exceeds N={n}")
    load = param(params, "load", 10.0, float, path, lambda v: v > 0, "must be > 0")
    duration = param(params, "duration", 40.0, float, path, lambda v: v > 0, "must be > 0")
    read_ratio = param(params, "read_ratio", 0.5, float, path, lambda v: 0 <= v <= 1, "out of [0,1]")
    op_timeout = param(params, "op_timeout", 1.0, float, path, lambda v: v > 0, "must be > 0")
    replicas = tuple(f"r{i + 1}" for i in range(n))
    n_ops = max(1, int(math.floor(duration * load + 1e-9)))

    def factory():
        nodes = {"client": Client("client", ClientState(replicas, r, w, 1.0 / load, n_ops, read_ratio, op_timeout))}
        for rep in replicas:
            nodes[rep] = Replica(rep, ReplicaState())
        return nodes

    return Model(
        name="quorum",
        params=params,
        factory=factory,
        event_map=EventMap({"issue": "op-start", "complete": "op-finish", "expire": "op-fail"}),
        tamper_presets={"stale-read": stale_value},
    )
