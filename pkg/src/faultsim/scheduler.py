"""Message interception, arrival-time queue and the global clock."""

import heapq
import math
from dataclasses import dataclass, replace

from .core import Envelope, GuardViolation, SimulationError, any_eager_enabled

FAMILIES = {
    "lognormal": ("mu", "sigma"),
    "exponential": ("rate",),
    "weibull": ("shape", "scale"),
    "constant": ("d",),
}


class DelayError(SimulationError):
    pass


@dataclass(frozen=True)
class DelayDistribution:
    family: str
    params: tuple

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown delay family {self.family!r}")
        names = FAMILIES[self.family]
        if len(self.params) != len(names):
            raise ValueError(f"{self.family} takes parameters {names}")
        p = dict(zip(names, self.params))
        if self.family == "lognormal" and not p["sigma"] >= 0:
            raise ValueError("lognormal sigma must be >= 0")
        if self.family == "exponential" and not p["rate"] > 0:
            raise ValueError("exponential rate must be > 0")
        if self.family == "weibull" and not (p["shape"] > 0 and p["scale"] > 0):
            raise ValueError("weibull shape and scale must be > 0")
        if self.family == "constant" and not p["d"] > 0:
            raise ValueError("constant delay must be > 0")

    @classmethod
    def lognormal(cls, mu, sigma):
        return cls("lognormal", (float(mu), float(sigma)))

    @classmethod
    def exponential(cls, rate):
        return cls("exponential", (float(rate),))

    @classmethod
    def weibull(cls, shape, scale):
        return cls("weibull", (float(shape), float(scale)))

    @classmethod
    def constant(cls, d):
        return cls("constant", (float(d),))

    @classmethod
    def from_dict(cls, data):
        family = data.get("family")
        if family not in FAMILIES:
            raise ValueError(f"unknown delay family {family!r}")
        missing = [n for n in FAMILIES[family] if n not in data]
        if missing:
            raise ValueError(f"{family} delay needs {', '.join(missing)}")
        return cls(family, tuple(float(data[n]) for n in FAMILIES[family]))

    def to_dict(self):
        return {"family": self.family, **dict(zip(FAMILIES[self.family], self.params))}

    def sample(self, rng):
        f = self.family
        if f == "lognormal":
            return rng.lognormal(*self.params)
        if f == "exponential":
            return rng.exponential(self.params[0])
        if f == "weibull":
            return rng.weibull(*self.params)
        return self.params[0]

    def mean(self):
        f, p = self.family, self.params
        if f == "lognormal":
            return math.exp(p[0] + p[1] ** 2 / 2)
        if f == "exponential":
            return 1.0 / p[0]
        if f == "weibull":
            return p[1] * math.gamma(1 + 1 / p[0])
        return p[0]


class Scheduler:
    """Holds in-transit envelopes ordered by (arrival, insertion sequence)."""

    def __init__(self):
        self.clock = 0.0
        self._queue = []
        self._seq = 0

    def __len__(self):
        return len(self._queue)

    def intercept(self, emissions, dist, rng):
        """Stamp each emission with an arrival time and enqueue it."""
        out = []
        for em in emissions:
            if em.after is None:
                delay = dist.sample(rng)
                if not (delay > 0 and math.isfinite(delay)):
                    raise DelayError(f"invalid delay sample {delay!r}")
            else:
                delay = em.after
                if not (delay >= 0 and math.isfinite(delay)):
                    raise DelayError(f"invalid timer delay {delay!r}")
            env = Envelope(self.clock + delay, em.src, em.dst, em.payload, em.label)
            out.append(self.push(env))
        return out

    def push(self, env):
        """Enqueue an envelope whose arrival is already set; assigns a fresh seq."""
        if env.arrival < self.clock:
            raise SimulationError(f"arrival {env.arrival} before clock {self.clock}")
        self._seq += 1
        env = replace(env, seq=self._seq)
        heapq.heappush(self._queue, (env.arrival, self._seq, env))
        return env

    def peek(self):
        return self._queue[0][2] if self._queue else None

    def tick(self, nodes, horizon=math.inf):
        """Pop the head envelope and advance the clock to its arrival.

        Returns None when the queue is empty or the head lies beyond
        ``horizon``; the clock is left untouched in that case.
        """
        if any_eager_enabled(nodes):
            raise GuardViolation("guard violation: tick while an eager transition is enabled")
        if not self._queue or self._queue[0][0] > horizon:
            return None
        arrival, _, env = heapq.heappop(self._queue)
        self.clock = arrival
        return env

    def pending(self):
        """Queued envelopes in delivery order (does not consume them)."""
        return [item[2] for item in sorted(self._queue)]
