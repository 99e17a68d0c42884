"""The run loop tying nodes, scheduler, controller and handlers together.

Every step does exactly one thing: fire an enabled object-triggered rule
(nodes scanned in id order), or else pop the next envelope and pass it
through control until it is delivered, dropped or rescheduled. A run ends
when neither is possible or the next arrival lies beyond the horizon.
"""

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Optional

from .core import SimulationError, deliver, eager_step, reboot_node, start_node
from .faults import (
    Behavior,
    Drop,
    EnvChangedRecheck,
    FaultConfig,
    ModifiedRecheck,
    Release,
    Reschedule,
    control,
    handle,
)
from .monitor import Monitor
from .rng import Rng
from .scheduler import Scheduler

DEFAULT_STEP_LIMIT = 5_000_000


class AssumptionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TraceEntry:
    """One observable step. ``kind`` is deliver, drop, authorize or fire."""

    kind: str
    time: float
    env: Any = None
    behavior: Optional[Behavior] = None
    eligible: tuple = ()
    node: Any = None
    label: Optional[str] = None
    subject: Any = None


@dataclass
class Counters:
    intercepted: int = 0
    delivered: int = 0
    dropped: Counter = field(default_factory=Counter)
    duplicated: int = 0
    tampered: int = 0
    equivocated: int = 0
    delayed: int = 0
    crashes: int = 0
    reboots: int = 0
    queued: int = 0

    @property
    def dropped_total(self):
        return sum(self.dropped.values())

    def balanced(self):
        """Every envelope that entered the queue was delivered, dropped or is still queued."""
        return self.intercepted + self.duplicated == self.delivered + self.dropped_total + self.queued

    def to_dict(self):
        return {
            "intercepted": self.intercepted,
            "delivered": self.delivered,
            "dropped": self.dropped_total,
            "dropped_by": {str(b): n for b, n in sorted(self.dropped.items())},
            "duplicated": self.duplicated,
            "tampered": self.tampered,
            "equivocated": self.equivocated,
            "delayed": self.delayed,
            "crashes": self.crashes,
            "reboots": self.reboots,
            "queued": self.queued,
        }


@dataclass
class RunResult:
    seed: int
    log: Any
    counters: Counters
    trace: list
    clock: float
    steps: int
    nodes: dict
    states: Any

    def deliveries_and_drops(self):
        return [e for e in self.trace if e.kind in ("deliver", "drop")]


class Simulation:
    def __init__(
        self,
        model,
        delay,
        faults=None,
        events=None,
        horizon=math.inf,
        seed=0,
        monitor=True,
        trace=False,
        step_limit=DEFAULT_STEP_LIMIT,
    ):
        self.model = model
        self.delay = delay
        self.faults = faults or FaultConfig()
        self.horizon = math.inf if horizon is None else float(horizon)
        self.seed = seed
        self.rng = Rng(seed)
        self.nodes = model.nodes()
        self.order = sorted(self.nodes)
        self.states = self.faults.states(model, delay, self.nodes)
        self.ctrl = self.faults.controller()
        self.sched = Scheduler()
        self.monitor = Monitor(events if events is not None else model.event_map) if monitor else None
        self.tracing = trace
        self.trace = []
        self.counters = Counters()
        self.step_limit = step_limit
        n_targets = len(self.states.crash.targets) if self.states.crash else 0
        self.control_cap = len(self.ctrl.behaviors) + 2 * n_targets + 2

    # helpers -------------------------------------------------------------

    def _emit(self, firing):
        now = self.sched.clock
        if self.monitor is not None:
            self.monitor.record(firing.label, firing.subject, now)
        if self.tracing:
            self.trace.append(TraceEntry("fire", now, node=firing.node_id, label=firing.label, subject=firing.subject))
        if firing.emissions:
            self.counters.intercepted += len(firing.emissions)
            self.sched.intercept(firing.emissions, self.delay, self.rng)

    def _fault_event(self, behavior, subject=None):
        if self.monitor is not None:
            self.monitor.record(str(behavior), subject, self.sched.clock)

    def _check_initial(self):
        enabled = [nid for nid in self.order if self.nodes[nid].enabled_eager()]
        if len(enabled) > 1:
            msg = f"initial state has {len(enabled)} enabled objects ({', '.join(enabled)})"
            if getattr(self.model, "builtin", False):
                raise SimulationError(msg)
            warnings.warn(msg, AssumptionWarning, stacklevel=3)

    # main loop -----------------------------------------------------------

    def run(self):
        self._check_initial()
        for nid in self.order:
            self._emit(start_node(self.nodes[nid], self.rng))
        steps = 0
        while True:
            steps += 1
            if steps > self.step_limit:
                raise SimulationError(f"step limit {self.step_limit} exceeded")
            if self._eager():
                continue
            env = self.sched.tick(self.nodes.values(), self.horizon)
            if env is None:
                break
            self._process(env)
        self.counters.queued = len(self.sched)
        if not self.counters.balanced():
            raise SimulationError(f"conservation violated: {self.counters.to_dict()}")
        return RunResult(
            seed=self.seed,
            log=self.monitor.log if self.monitor is not None else None,
            counters=self.counters,
            trace=self.trace,
            clock=self.sched.clock,
            steps=steps - 1,
            nodes=self.nodes,
            states=self.states,
        )

    def _eager(self):
        for nid in self.order:
            firing = eager_step(self.nodes[nid], self.sched.clock, self.rng)
            if firing is not None:
                self._emit(firing)
                return True
        return False

    def _process(self, env):
        c = self.counters
        now = self.sched.clock
        for _ in range(self.control_cap):
            out = control(self.ctrl, env, self.states, self.rng)
            if isinstance(out, Release):
                node = self.nodes[env.dst]
                firing = deliver(node, env, now, self.rng)
                c.delivered += 1
                if self.tracing:
                    self.trace.append(TraceEntry("deliver", now, env))
                self._emit(firing)
                return
            b = out.behavior
            if self.tracing:
                self.trace.append(TraceEntry("authorize", now, env, b, out.eligible))
            res = handle(b, env, self.states, self.rng, now)
            self._fault_event(b, getattr(res, "crashed", None) or getattr(res, "rebooted", None))
            if isinstance(res, Drop):
                c.dropped[b] += 1
                if self.tracing:
                    self.trace.append(TraceEntry("drop", now, env, b))
                return
            if isinstance(res, Reschedule):
                for e in res.envelopes:
                    self.sched.push(e)
                c.delayed += 1
                return
            if isinstance(res, ModifiedRecheck):
                if b is Behavior.TAMPERING:
                    c.tampered += 1
                else:
                    c.equivocated += 1
                env = res.env
                continue
            if isinstance(res, EnvChangedRecheck):
                for e in res.reschedule:
                    self.sched.push(e)
                c.duplicated += len(res.reschedule)
                if res.crashed is not None:
                    self.nodes[res.crashed].crashed = True
                    c.crashes += 1
                if res.rebooted is not None:
                    self._reboot(res.rebooted)
                env = res.env
                continue
            raise SimulationError(f"unexpected handler outcome {res!r}")
        raise SimulationError(f"control loop for envelope {env.seq} did not settle")

    def _reboot(self, nid):
        node = self.nodes[nid]
        node.crashed = False
        if self.states.crash.amnesia:
            node.reset()
        self.counters.reboots += 1
        self._emit(reboot_node(node, self.sched.clock, self.rng))


def simulate(model, delay, faults=None, events=None, horizon=math.inf, seed=0, monitor=True, trace=False, **kw):
    return Simulation(model, delay, faults, events, horizon, seed, monitor, trace, **kw).run()
