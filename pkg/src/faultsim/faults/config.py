"""Parsing and validation of the ``faults`` block of a run config.

The block mirrors the handler layout: a ``behaviors`` list selects which of
the fifteen behaviors are injected, and one section per handler carries its
parameters::

    {"behaviors": ["msg-loss", "part-time", "part-drop", "recover-time"],
     "msg-loss": {"rate": 0.3, "rules": ["decision"], "receivers": ["ch2"]},
     "partition": {"occur_time": 5.0, "duration": 20.0,
                   "parts": [["c", "ch1"], ["ch2"]]}}
"""

import math
from dataclasses import dataclass, field

from ..scheduler import DelayDistribution
from .behaviors import Behavior as B
from .behaviors import parse_behavior
from .control import ControllerState
from .handlers import (
    CrashState,
    CrashTarget,
    DelayConfig,
    DupConfig,
    EquivSpec,
    HandlerStates,
    MsgLossConfig,
    PartitionState,
    TamperSpec,
    Target,
)

SECTION_KEYS = {
    "msg-loss": {"rate", "rules", "receivers"},
    "partition": {"nodes", "parts", "occur_time", "duration", "split_on", "heal_on"},
    "crash": {"targets", "amnesia"},
    "tampering": {"target", "transform", "rate"},
    "equivocation": {"senders", "labels", "variant", "rate"},
    "duplication": {"target", "copies", "rate"},
    "abnormal-delay": {"target", "extra", "rate"},
}
CRASH_TARGET_KEYS = {"node", "crash_time", "reboot_time", "crash_on", "reboot_on"}
CRASH_BEHAVIORS = {B.CRASH_TIME, B.CRASH_MSG, B.REBOOT_TIME, B.REBOOT_MSG}


class FaultConfigError(ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _number(value, path, lo=None, hi=None, lo_open=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise FaultConfigError(path, f"expected a finite number, got {value!r}")
    value = float(value)
    if lo is not None and (value < lo or (lo_open and value == lo)):
        raise FaultConfigError(path, f"value {value} out of range")
    if hi is not None and value > hi:
        raise FaultConfigError(path, f"value {value} out of range")
    return value


def _rate(value, path):
    try:
        return _number(value, path, 0.0, 1.0)
    except FaultConfigError:
        raise FaultConfigError(path, f"rate out of [0,1]: {value!r}") from None


def _names(value, path):
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise FaultConfigError(path, f"expected a list of names, got {value!r}")
    return sorted(set(value))


def _target(value, path):
    if value is None:
        return None
    if not isinstance(value, dict):
        raise FaultConfigError(path, "expected an object with labels/src/dst/kinds")
    try:
        return Target.from_dict({k: _names(v, f"{path}.{k}") for k, v in value.items()}).to_dict()
    except ValueError as exc:
        if isinstance(exc, FaultConfigError):
            raise
        raise FaultConfigError(path, str(exc)) from None


def _check_keys(data, allowed, path):
    if not isinstance(data, dict):
        raise FaultConfigError(path, "expected an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise FaultConfigError(path, f"unknown field(s) {unknown}")


def _normalize_section(name, data, path):
    _check_keys(data, SECTION_KEYS[name], path)
    out = {}
    if name == "msg-loss":
        for key in ("rate", "rules", "receivers"):
            if key not in data:
                raise FaultConfigError(f"{path}.{key}", "required")
        out["rate"] = _rate(data["rate"], f"{path}.rate")
        out["rules"] = _names(data["rules"], f"{path}.rules")
        out["receivers"] = _names(data["receivers"], f"{path}.receivers")
    elif name == "partition":
        if "nodes" in data:
            out["nodes"] = _names(data["nodes"], f"{path}.nodes")
        parts = data.get("parts", "random")
        if parts != "random":
            if not (isinstance(parts, list) and len(parts) == 2):
                raise FaultConfigError(f"{path}.parts", "expected two sides or \"random\"")
            sides = [_names(side, f"{path}.parts[{i}]") for i, side in enumerate(parts)]
            if not sides[0] or not sides[1]:
                raise FaultConfigError(f"{path}.parts", "sides must be nonempty")
            if set(sides[0]) & set(sides[1]):
                raise FaultConfigError(f"{path}.parts", "sides must be disjoint")
            parts = sides
        out["parts"] = parts
        if "occur_time" in data:
            out["occur_time"] = _number(data["occur_time"], f"{path}.occur_time", 0.0)
        if "duration" in data:
            out["duration"] = _number(data["duration"], f"{path}.duration", 0.0, lo_open=True)
        for key in ("split_on", "heal_on"):
            if key in data:
                out[key] = _target(data[key], f"{path}.{key}")
    elif name == "crash":
        targets = data.get("targets")
        if not isinstance(targets, list) or not targets:
            raise FaultConfigError(f"{path}.targets", "expected a nonempty list")
        norm = []
        for i, t in enumerate(targets):
            tp = f"{path}.targets[{i}]"
            _check_keys(t, CRASH_TARGET_KEYS, tp)
            if not isinstance(t.get("node"), str):
                raise FaultConfigError(f"{tp}.node", "required")
            entry = {"node": t["node"]}
            for key in ("crash_time", "reboot_time"):
                if key in t:
                    entry[key] = _number(t[key], f"{tp}.{key}", 0.0)
            if "crash_time" in entry and "reboot_time" in entry and entry["reboot_time"] <= entry["crash_time"]:
                raise FaultConfigError(f"{tp}.reboot_time", "must be later than crash_time")
            for key in ("crash_on", "reboot_on"):
                if key in t:
                    entry[key] = _target(t[key], f"{tp}.{key}")
            norm.append(entry)
        out["targets"] = norm
        out["amnesia"] = bool(data.get("amnesia", False))
    elif name == "tampering":
        if not isinstance(data.get("transform"), str):
            raise FaultConfigError(f"{path}.transform", "required preset name")
        out["transform"] = data["transform"]
        out["target"] = _target(data.get("target", {}), f"{path}.target")
        out["rate"] = _rate(data.get("rate", 1.0), f"{path}.rate")
    elif name == "equivocation":
        if "senders" not in data:
            raise FaultConfigError(f"{path}.senders", "required")
        if not isinstance(data.get("variant"), str):
            raise FaultConfigError(f"{path}.variant", "required preset name")
        out["senders"] = _names(data["senders"], f"{path}.senders")
        if data.get("labels") is not None:
            out["labels"] = _names(data["labels"], f"{path}.labels")
        out["variant"] = data["variant"]
        out["rate"] = _rate(data.get("rate", 1.0), f"{path}.rate")
    elif name == "duplication":
        copies = data.get("copies", 1)
        if isinstance(copies, bool) or not isinstance(copies, int) or copies < 1:
            raise FaultConfigError(f"{path}.copies", "expected a positive integer")
        out["copies"] = copies
        out["target"] = _target(data.get("target", {}), f"{path}.target")
        out["rate"] = _rate(data.get("rate", 1.0), f"{path}.rate")
    elif name == "abnormal-delay":
        if "extra" not in data:
            raise FaultConfigError(f"{path}.extra", "required delay distribution")
        try:
            out["extra"] = DelayDistribution.from_dict(data["extra"]).to_dict()
        except (ValueError, AttributeError, TypeError) as exc:
            raise FaultConfigError(f"{path}.extra", str(exc)) from None
        out["target"] = _target(data.get("target", {}), f"{path}.target")
        out["rate"] = _rate(data.get("rate", 1.0), f"{path}.rate")
    return out


@dataclass(frozen=True)
class FaultConfig:
    behaviors: tuple = ()
    sections: dict = field(default_factory=dict)

    @property
    def priority(self):
        return {b: b.level for b in self.behaviors}

    @classmethod
    def from_dict(cls, data, path="faults"):
        if data is None:
            return cls()
        _check_keys(data, {"behaviors"} | set(SECTION_KEYS), path)
        raw = data.get("behaviors", [])
        if not isinstance(raw, list):
            raise FaultConfigError(f"{path}.behaviors", "expected a list")
        behaviors = []
        for i, name in enumerate(raw):
            try:
                b = parse_behavior(name)
            except ValueError as exc:
                raise FaultConfigError(f"{path}.behaviors[{i}]", str(exc)) from None
            if b in behaviors:
                raise FaultConfigError(f"{path}.behaviors[{i}]", f"duplicate behavior {b}")
            behaviors.append(b)
        # deliveries to crashed nodes are unreachable by construction
        if CRASH_BEHAVIORS & set(behaviors) and B.CRASH_DROP not in behaviors:
            behaviors.append(B.CRASH_DROP)

        sections = {}
        for name in SECTION_KEYS:
            if name in data:
                sections[name] = _normalize_section(name, data[name], f"{path}.{name}")
        for i, b in enumerate(behaviors):
            if b.section not in sections:
                raise FaultConfigError(f"{path}.{b.section}", f"missing handler config for {b}")
        part = sections.get("partition")
        needs = {
            B.PART_TIME: ("occur_time", part),
            B.RECOVER_TIME: ("duration", part),
            B.PART_MSG: ("split_on", part),
            B.RECOVER_MSG: ("heal_on", part),
        }
        for b, (key, sec) in needs.items():
            if b in behaviors and key not in sec:
                raise FaultConfigError(f"{path}.partition.{key}", f"required by {b}")
        crash = sections.get("crash")
        crash_needs = {
            B.CRASH_TIME: "crash_time",
            B.CRASH_MSG: "crash_on",
            B.REBOOT_TIME: "reboot_time",
            B.REBOOT_MSG: "reboot_on",
        }
        for b, key in crash_needs.items():
            if b in behaviors and not any(key in t for t in crash["targets"]):
                raise FaultConfigError(f"{path}.crash.targets", f"{b} needs a target with {key}")
        return cls(tuple(behaviors), sections)

    def to_dict(self):
        out = {"behaviors": [str(b) for b in self.behaviors]}
        out.update(self.sections)
        return out

    def controller(self):
        return ControllerState(self.behaviors)

    def validate(self, model, path="faults"):
        """Check labels, node names and presets against ``model``."""
        labels = model.labels
        nodes = set(model.node_ids)

        def check_labels(values, p):
            for v in values or ():
                if v not in labels:
                    raise FaultConfigError(p, f"unknown rule label {v!r}")

        def check_nodes(values, p, symbolic=False):
            for v in values or ():
                if v in nodes or (symbolic and v in model.symbols):
                    continue
                raise FaultConfigError(p, f"unknown node {v!r}")

        def check_target(t, p):
            if t is None:
                return
            check_labels(t.get("labels"), f"{p}.labels")
            check_nodes(t.get("src"), f"{p}.src")
            check_nodes(t.get("dst"), f"{p}.dst")

        s = self.sections
        if "msg-loss" in s:
            check_labels(s["msg-loss"]["rules"], f"{path}.msg-loss.rules")
            check_nodes(s["msg-loss"]["receivers"], f"{path}.msg-loss.receivers")
        if "partition" in s:
            sec = s["partition"]
            all_nodes = sec.get("nodes", sorted(nodes))
            check_nodes(all_nodes, f"{path}.partition.nodes")
            if len(all_nodes) < 2:
                raise FaultConfigError(f"{path}.partition.nodes", "partition impossible with fewer than 2 nodes")
            if sec["parts"] != "random":
                for i, side in enumerate(sec["parts"]):
                    check_nodes(side, f"{path}.partition.parts[{i}]")
                if set(sec["parts"][0]) | set(sec["parts"][1]) != set(all_nodes):
                    raise FaultConfigError(f"{path}.partition.parts", "sides must cover the partition nodes")
            for key in ("split_on", "heal_on"):
                check_target(sec.get(key), f"{path}.partition.{key}")
        if "crash" in s:
            for i, t in enumerate(s["crash"]["targets"]):
                p = f"{path}.crash.targets[{i}]"
                check_nodes([t["node"]], f"{p}.node", symbolic=True)
                check_target(t.get("crash_on"), f"{p}.crash_on")
                check_target(t.get("reboot_on"), f"{p}.reboot_on")
        if "tampering" in s:
            check_target(s["tampering"]["target"], f"{path}.tampering.target")
            if s["tampering"]["transform"] not in model.tamper_presets:
                raise FaultConfigError(f"{path}.tampering.transform", f"unknown preset {s['tampering']['transform']!r}")
        if "equivocation" in s:
            check_nodes(s["equivocation"]["senders"], f"{path}.equivocation.senders")
            check_labels(s["equivocation"].get("labels"), f"{path}.equivocation.labels")
            if s["equivocation"]["variant"] not in model.equiv_presets:
                raise FaultConfigError(f"{path}.equivocation.variant", f"unknown preset {s['equivocation']['variant']!r}")
        for name in ("duplication", "abnormal-delay"):
            if name in s:
                check_target(s[name]["target"], f"{path}.{name}.target")

    def states(self, model, network_delay, nodes=None):
        """Fresh handler states for one run over the live ``nodes``."""
        s = self.sections
        hs = HandlerStates(network_delay=network_delay)
        if "msg-loss" in s:
            sec = s["msg-loss"]
            hs.msg_loss = MsgLossConfig(sec["rate"], frozenset(sec["rules"]), frozenset(sec["receivers"]))
        if "partition" in s:
            sec = s["partition"]
            parts = None
            if sec["parts"] != "random":
                parts = (frozenset(sec["parts"][0]), frozenset(sec["parts"][1]))
            hs.partition = PartitionState(
                all_nodes=tuple(sec.get("nodes", sorted(model.node_ids))),
                parts=parts,
                occur_time=sec.get("occur_time"),
                duration=sec.get("duration"),
                split_on=Target.from_dict(sec.get("split_on")),
                heal_on=Target.from_dict(sec.get("heal_on")),
            )
        if "crash" in s:
            sec = s["crash"]
            targets = [
                CrashTarget(
                    node=t["node"],
                    crash_time=t.get("crash_time"),
                    reboot_time=t.get("reboot_time"),
                    crash_on=Target.from_dict(t.get("crash_on")),
                    reboot_on=Target.from_dict(t.get("reboot_on")),
                )
                for t in sec["targets"]
            ]
            hs.crash = CrashState(
                targets, amnesia=sec["amnesia"], resolver=lambda name: model.resolve(name, nodes)
            )
        if "tampering" in s:
            sec = s["tampering"]
            hs.tampering = TamperSpec(
                Target.from_dict(sec["target"]), model.tamper_presets[sec["transform"]], sec["transform"], sec["rate"]
            )
        if "equivocation" in s:
            sec = s["equivocation"]
            labels = frozenset(sec["labels"]) if "labels" in sec else None
            hs.equivocation = EquivSpec(
                frozenset(sec["senders"]), model.equiv_presets[sec["variant"]], labels, sec["variant"], sec["rate"]
            )
        if "duplication" in s:
            sec = s["duplication"]
            hs.duplication = DupConfig(Target.from_dict(sec["target"]), sec["copies"], sec["rate"])
        if "abnormal-delay" in s:
            sec = s["abnormal-delay"]
            hs.abnormal_delay = DelayConfig(
                Target.from_dict(sec["target"]), DelayDistribution.from_dict(sec["extra"]), sec["rate"]
            )
        return hs
