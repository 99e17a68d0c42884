"""Shared run configs for the integration and acceptance tests."""

from faultsim import RunConfig

DELAY = {"family": "lognormal", "mu": -3.0, "sigma": 0.5}

RAFT_CRASH = {
    "behaviors": ["crash-msg"],
    "crash": {"targets": [{"node": "@leader", "crash_on": {"labels": ["heartbeat"], "kinds": ["append"]}}]},
}

QUORUM_PARTITION = {
    "behaviors": ["part-time", "part-drop", "recover-time"],
    "partition": {"occur_time": 5.0, "duration": 20.0, "parts": [["client", "r1"], ["r2", "r3"]]},
}

# one config per built-in model; each mixes level-1, level-2 and level-3 behaviors
MIXED = {
    "2pc": {
        "model": {"name": "2pc", "params": {"n_proposals": 6, "acks": True, "retransmit_timeout": 0.5}},
        "delay": DELAY,
        "faults": {
            "behaviors": ["msg-loss", "part-time", "part-drop", "recover-time", "duplication", "abnormal-delay"],
            "msg-loss": {"rate": 0.2, "rules": ["decision", "retransmit"], "receivers": ["ch1", "ch2"]},
            "partition": {"occur_time": 0.3, "duration": 0.6, "parts": [["c", "ch1"], ["ch2"]]},
            "duplication": {"target": {"labels": ["vote"]}, "copies": 2, "rate": 0.3},
            "abnormal-delay": {"target": {"labels": ["start"]}, "extra": {"family": "exponential", "rate": 5.0}, "rate": 0.5},
        },
        "horizon": 60.0,
    },
    "raft": {
        "model": {"name": "raft", "params": {"n": 5}},
        "delay": DELAY,
        "faults": {
            "behaviors": ["crash-msg", "part-time", "part-drop", "recover-time", "msg-loss", "abnormal-delay"],
            "crash": RAFT_CRASH["crash"],
            "partition": {"occur_time": 6.0, "duration": 3.0, "parts": "random"},
            "msg-loss": {"rate": 0.1, "rules": ["vote", "tally"], "receivers": ["n1", "n2", "n3", "n4", "n5"]},
            "abnormal-delay": {"target": {"kinds": ["append"]}, "extra": {"family": "weibull", "shape": 1.5, "scale": 0.2}, "rate": 0.2},
        },
        "horizon": 15.0,
    },
    "quorum": {
        "model": {"name": "quorum", "params": {"n": 3, "R": 2, "W": 2, "load": 5.0, "duration": 10.0}},
        "delay": DELAY,
        "faults": {
            "behaviors": ["part-time", "part-drop", "recover-time", "crash-time", "reboot-time", "duplication", "tampering"],
            "partition": {"occur_time": 2.0, "duration": 3.0, "parts": [["client", "r1"], ["r2", "r3"]]},
            "crash": {"targets": [{"node": "r3", "crash_time": 6.0, "reboot_time": 8.0}], "amnesia": True},
            "duplication": {"target": {"labels": ["issue"], "kinds": ["write"]}, "copies": 1, "rate": 0.5},
            "tampering": {"target": {"labels": ["serve-read"]}, "transform": "stale-read", "rate": 0.3},
        },
        "horizon": 12.0,
    },
    "toy-leader": {
        "model": {"name": "toy-leader", "params": {"acceptors": 4, "rounds": 8}},
        "delay": DELAY,
        "faults": {
            "behaviors": ["equivocation", "tampering", "part-time", "part-drop", "recover-msg", "duplication"],
            "equivocation": {"senders": ["p"], "variant": "conflicting-proposal", "labels": ["propose"], "rate": 0.5},
            "tampering": {"target": {"labels": ["accept"]}, "transform": "corrupt-value", "rate": 0.2},
            "partition": {"occur_time": 2.0, "parts": [["p", "a1", "a2"], ["a3", "a4"]], "heal_on": {"labels": ["propose"], "dst": ["a1"]}},
            "duplication": {"target": {"labels": ["accept"]}, "copies": 1, "rate": 0.3},
        },
        "horizon": 20.0,
    },
}

TOY_EQUIV_PARTITION = {
    "model": {"name": "toy-leader", "params": {"acceptors": 4, "rounds": 10, "interval": 1.0}},
    "delay": DELAY,
    "faults": {
        "behaviors": ["equivocation", "part-time", "part-drop", "recover-time"],
        "equivocation": {"senders": ["p"], "variant": "conflicting-proposal", "labels": ["propose"]},
        "partition": {"occur_time": 2.5, "duration": 4.0, "parts": [["p", "a1", "a2"], ["a3", "a4"]]},
    },
}

TWO_PC_LOSS = {
    "model": {"name": "2pc", "params": {"n_proposals": 20, "acks": True, "retransmit_timeout": 0.5}},
    "delay": DELAY,
    "faults": {
        "behaviors": ["msg-loss"],
        "msg-loss": {"rate": 0.0, "rules": ["decision", "retransmit"], "receivers": ["ch1", "ch2"]},
    },
    "metric": {"name": "avg-latency"},
}


def config(data):
    return RunConfig.from_dict(data)
