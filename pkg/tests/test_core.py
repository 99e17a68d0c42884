import pytest

from faultsim.core import (
    EagerAmbiguity,
    Envelope,
    NoApplicableTransition,
    Node,
    Payload,
    SimulationError,
    any_eager_enabled,
    deliver,
    eager,
    eager_step,
    on,
    start_node,
)
from faultsim.rng import Rng




class Counter(Node):
    @on("ping", label="pong")
    def pong(self, ctx, src, body):
        self.state["n"] += 1
        ctx.subject = body
        ctx.send(src, "pong", self.state["n"])

    @eager("flush", when=lambda self: self.state["n"] >= 2 and not self.state["flushed"])
    def flush(self, ctx):
        self.state["flushed"] = True
        ctx.timer(1.5, "ping", "self")


class Ambiguous(Node):
    @eager("a", when=lambda self: True)
    def a(self, ctx):
        pass

    @eager("b", when=lambda self: True)
    def b(self, ctx):
        pass


def env(kind, dst="x", body=None):
    return Envelope(1.0, "y", dst, Payload(kind, body), "lbl")


def test_deliver_applies_rule_and_labels_emissions():
    n = Counter("x", {"n": 0, "flushed": False})
    f = deliver(n, env("ping", body="q"), 1.0, Rng(0))
    assert n.state["n"] == 1
    assert f.label == "pong" and f.subject == "q"
    (em,) = f.emissions
    assert (em.label, em.src, em.dst, em.payload, em.after) == ("pong", "x", "y", Payload("pong", 1), None)


def test_deliver_unknown_kind():
    n = Counter("x", {"n": 0, "flushed": False})
    with pytest.raises(NoApplicableTransition, match="no applicable transition"):
        deliver(n, env("nope"), 1.0, Rng(0))


def test_deliver_wrong_node_or_crashed():
    n = Counter("x", {"n": 0, "flushed": False})
    with pytest.raises(SimulationError):
        deliver(n, env("ping", dst="z"), 1.0, Rng(0))
    n.crashed = True
    with pytest.raises(SimulationError):
        deliver(n, env("ping"), 1.0, Rng(0))


def test_eager_step():
    n = Counter("x", {"n": 0, "flushed": False})
    assert eager_step(n, 0.0, Rng(0)) is None
    n.state["n"] = 2
    assert any_eager_enabled([n])
    f = eager_step(n, 3.0, Rng(0))
    assert f.label == "flush"
    assert f.emissions[0].after == 1.5 and f.emissions[0].dst == "x"
    assert not any_eager_enabled([n])


def test_eager_skips_crashed():
    n = Counter("x", {"n": 5, "flushed": False})
    n.crashed = True
    assert eager_step(n, 0.0, Rng(0)) is None
    assert not any_eager_enabled([n])


def test_eager_ambiguity():
    with pytest.raises(EagerAmbiguity, match="eager ambiguity"):
        eager_step(Ambiguous("a", {}), 0.0, Rng(0))


def test_rule_labels_and_reset():
    assert Counter.rule_labels() == {"pong", "flush"}
    n = Counter("x", {"n": 0, "flushed": False})
    deliver(n, env("ping"), 1.0, Rng(0))
    n.reset()
    assert n.state == {"n": 0, "flushed": False}


def test_start_default_is_silent():
    f = start_node(Counter("x", {"n": 0, "flushed": False}), Rng(0))
    assert f.label == "init" and f.emissions == []


def test_envelope_copy_is_deep():
    e = Envelope(1.0, "a", "b", Payload("k", [1, 2]), "l")
    c = e.copy(arrival=2.0)
    c.payload.body.append(3)
    assert e.payload.body == [1, 2]
    assert e.with_applied("x").applied == frozenset({"x"})
