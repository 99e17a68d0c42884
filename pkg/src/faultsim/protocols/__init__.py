from .base import Model, ModelConfigError
from .quorum import build_quorum
from .raft import build_raft_election, current_leader, elected_terms
from .toyleader import build_toy_leader
from .twopc import TWO_PROPOSAL_INIT, build_2pc

BUILDERS = {
    "2pc": build_2pc,
    "raft": build_raft_election,
    "quorum": build_quorum,
    "toy-leader": build_toy_leader,
}


def build_model(name, params=None, path="model"):
    if name not in BUILDERS:
        raise ModelConfigError(f"{path}.name: unknown model {name!r} (known: {', '.join(sorted(BUILDERS))})")
    return BUILDERS[name](params, path=f"{path}.params")


__all__ = [
    "TWO_PROPOSAL_INIT",
    "BUILDERS",
    "Model",
    "ModelConfigError",
    "build_2pc",
    "build_model",
    "build_quorum",
    "build_raft_election",
    "build_toy_leader",
    "current_leader",
    "elected_terms",
]
