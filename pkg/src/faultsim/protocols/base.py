from dataclasses import dataclass, field
from typing import Callable


class ModelConfigError(ValueError):
    pass


@dataclass
class Model:
    """A protocol instance: how to build its nodes plus what configs may reference.

    ``factory`` returns a fresh ``{node_id: Node}`` dict for every run.
    ``symbols`` maps names like ``"@leader"`` to functions of the live nodes
    returning a node id (or None when nothing matches yet).
    """

    name: str
    params: dict
    factory: Callable
    event_map: object
    tamper_presets: dict = field(default_factory=dict)
    equiv_presets: dict = field(default_factory=dict)
    symbols: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    builtin: bool = True
    quiescent: bool = True

    def __post_init__(self):
        sample = self.factory()
        self.node_ids = tuple(sorted(sample))
        labels = set()
        for node in sample.values():
            labels |= type(node).rule_labels()
        labels.add("init")
        self.labels = frozenset(labels)

    def nodes(self):
        return self.factory()

    def resolve(self, name, nodes):
        if name in self.symbols:
            return self.symbols[name](nodes)
        return name


def param(params, key, default, kind, path, check=None, msg=None):
    value = params.get(key, default)
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ModelConfigError(f"{path}.{key}: expected {kind.__name__}, got {value!r}")
    if check is not None and not check(value):
        raise ModelConfigError(f"{path}.{key}: {msg or 'out of range'} ({value!r})")
    return value


def check_keys(params, allowed, path):
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ModelConfigError(f"{path}: unknown parameter(s) {unknown}")
