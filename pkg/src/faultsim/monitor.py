"""Passive event log and the metrics computed from it.

An event map sends rule labels to event names. Whenever a rule with a
mapped label fires, the monitor appends one entry holding every mapped event
(each carrying the firing's subject, e.g. a proposal id) stamped with the
current clock. Metrics look only at the finished log.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any


class MonitorError(ValueError):
    pass


class MetricError(ValueError):
    """A metric is undefined on a log (for example no completed units)."""


@dataclass(frozen=True)
class Event:
    name: str
    subject: Any = None


@dataclass
class EventMap:
    """Label -> tuple of event names."""

    mapping: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mapping = {
            label: (names,) if isinstance(names, str) else tuple(names)
            for label, names in self.mapping.items()
        }

    @classmethod
    def from_dict(cls, data, path="events"):
        if not isinstance(data, dict):
            raise MonitorError(f"{path}: expected an object of label -> event name(s)")
        for label, names in data.items():
            if isinstance(names, str):
                continue
            if not isinstance(names, (list, tuple)) or not all(isinstance(n, str) for n in names):
                raise MonitorError(f"{path}.{label}: expected an event name or a list of names")
        return cls(dict(data))

    def to_dict(self):
        return {label: names[0] if len(names) == 1 else list(names) for label, names in self.mapping.items()}

    def events_for(self, label):
        return self.mapping.get(label, ())

    def validate(self, labels, path="events"):
        for label in self.mapping:
            if label not in labels:
                raise MonitorError(f"{path}.{label}: unknown rule label {label!r}")


class TimedEventLog:
    """Ordered list of ``(events, time)`` entries."""

    def __init__(self, entries=None):
        self.entries = list(entries or [])

    def append(self, events, time):
        if self.entries and time < self.entries[-1][1]:
            raise MonitorError(f"event time {time} earlier than last entry {self.entries[-1][1]}")
        self.entries.append((tuple(events), time))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, TimedEventLog) and self.entries == other.entries

    def __repr__(self):
        return f"TimedEventLog({self.entries!r})"

    def events(self):
        """Flattened ``(event, time)`` pairs in log order."""
        return [(ev, t) for evs, t in self.entries for ev in evs]

    def to_jsonl(self):
        lines = []
        for evs, t in self.entries:
            rec = {"time": t, "events": [{"name": e.name, "subject": _jsonable(e.subject)} for e in evs]}
            lines.append(json.dumps(rec, sort_keys=True))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_jsonl(cls, text):
        log = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            log.append([Event(e["name"], _unjson(e["subject"])) for e in rec["events"]], rec["time"])
        return log


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, (frozenset, set)):
        return sorted(value)
    return value


def _unjson(value):
    return tuple(value) if isinstance(value, list) else value


def record(log, fired_label, subject, clock, event_map):
    names = event_map.events_for(fired_label)
    if names:
        log.append([Event(n, subject) for n in names], clock)
    return log


class Monitor:
    def __init__(self, event_map):
        self.event_map = event_map
        self.log = TimedEventLog()

    def record(self, label, subject, clock):
        record(self.log, label, subject, clock, self.event_map)


# metrics -----------------------------------------------------------------


def latency_pairs(log, start="propose", finish="finish"):
    """Match each start event with the earliest unmatched later finish of the same subject."""
    open_starts = {}
    pairs = []
    for evs, t in log:
        # finishes first: one in the same entry as its start must not pair with it
        for e in evs:
            if e.name == finish and open_starts.get(e.subject):
                t0 = open_starts[e.subject].pop(0)
                pairs.append((e.subject, t0, t))
        for e in evs:
            if e.name == start:
                open_starts.setdefault(e.subject, []).append(t)
    return pairs


def avg_latency(log, start="propose", finish="finish"):
    pairs = latency_pairs(log, start, finish)
    if not pairs:
        raise MetricError("no completed units")
    return sum(t1 - t0 for _, t0, t1 in pairs) / len(pairs)


def _window(window):
    t0, t1 = window
    if not t1 > t0:
        raise MetricError(f"empty window [{t0}, {t1})")
    return float(t0), float(t1)


def count(log, event="finish", window=None):
    if window is None:
        return sum(1 for e, _ in log.events() if e.name == event)
    t0, t1 = _window(window)
    return sum(1 for e, t in log.events() if e.name == event and t0 <= t < t1)


def throughput(log, event="finish", window=(0.0, 1.0)):
    t0, t1 = _window(window)
    return count(log, event, (t0, t1)) / (t1 - t0)


def span(log, start, end):
    """Time from the first ``start`` event to the first ``end`` event after it."""
    t_start = None
    for evs, t in log:
        names = {e.name for e in evs}
        if t_start is not None and end in names:
            return t - t_start
        if t_start is None and start in names:
            t_start = t
    raise MetricError("no completed units")


def _throughput_metric(log, event="finish", window=None, t0=None, t1=None):
    if window is None:
        window = (t0, t1)
    return throughput(log, event, tuple(window))


def _count_metric(log, event="finish", window=None):
    return float(count(log, event, tuple(window) if window is not None else None))


METRICS = {
    "avg-latency": avg_latency,
    "throughput": _throughput_metric,
    "count": _count_metric,
    "span": span,
}


@dataclass
class MetricSpec:
    name: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data, path="metric"):
        if isinstance(data, str):
            data = {"name": data}
        if not isinstance(data, dict) or not isinstance(data.get("name"), str):
            raise MonitorError(f"{path}.name: required metric name")
        unknown = set(data) - {"name", "params"}
        if unknown:
            raise MonitorError(f"{path}: unknown field(s) {sorted(unknown)}")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise MonitorError(f"{path}.params: expected an object")
        return cls(data["name"], dict(params))

    def to_dict(self):
        return {"name": self.name, "params": dict(self.params)}

    def resolve(self, extra=None):
        registry = {**METRICS, **(extra or {})}
        if self.name not in registry:
            raise MonitorError(f"metric.name: unknown metric {self.name!r}")
        return registry[self.name]

    def evaluate(self, log, extra=None):
        value = self.resolve(extra)(log, **self.params)
        if not math.isfinite(value):
            raise MetricError(f"metric {self.name} is not finite")
        return float(value)
