"""Compiled vs pure-Python random stream.

    python benchmarks/bench_rng.py [--draws N] [--runs N]

Raw draws compare both classes in one process. End-to-end runs need a
fresh interpreter per backend, since the backend is picked at import.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

from faultsim.rng import BACKEND, PyRng, Rng

CHILD = r"""
import json, sys, time
from faultsim import RunConfig, rng
from faultsim.runner import run_config
cfg = RunConfig.from_dict(json.loads(sys.argv[1]))
n = int(sys.argv[2])
run_config(cfg, 0)
t = time.perf_counter()
for s in range(n):
    run_config(cfg, s)
print(json.dumps({"backend": rng.BACKEND, "seconds": time.perf_counter() - t}))
"""

CONFIGS = {
    "2pc-loss": {
        "model": {"name": "2pc", "params": {"n_proposals": 20, "acks": True, "retransmit_timeout": 0.5}},
        "faults": {"behaviors": ["msg-loss"], "msg-loss": {"rate": 0.2, "rules": ["decision", "retransmit"], "receivers": ["ch1", "ch2"]}},
    },
    "raft-crash": {
        "model": {"name": "raft"},
        "faults": {"behaviors": ["crash-msg"], "crash": {"targets": [{"node": "@leader", "crash_on": {"labels": ["heartbeat"]}}]}},
        "horizon": 20.0,
    },
}


def raw(cls, n):
    r = cls(1)

    def draws():
        f = r.random
        for _ in range(n):
            f()

    def lognormals():
        f = r.lognormal
        for _ in range(n):
            f(-3.0, 0.5)

    return {
        "random": min(timeit.repeat(draws, number=1, repeat=5)) / n * 1e9,
        "lognormal": min(timeit.repeat(lognormals, number=1, repeat=5)) / n * 1e9,
    }


def end_to_end(cfg, runs, pure):
    env = dict(os.environ)
    env.pop("FAULTSIM_PURE_PYTHON", None)
    if pure:
        env["FAULTSIM_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", CHILD, json.dumps(cfg), str(runs)],
        env=env, check=True, capture_output=True, text=True,
    )
    res = json.loads(out.stdout)
    return res["backend"], res["seconds"] / runs * 1e3


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=200_000)
    ap.add_argument("--runs", type=int, default=200)
    args = ap.parse_args(argv)

    if BACKEND == PyRng.backend:
        print("compiled extension not built; only the pure-Python numbers are meaningful")
    print(f"raw draws (ns per call, best of 5, {args.draws} calls)")
    fast, slow = raw(Rng, args.draws), raw(PyRng, args.draws)
    for k in fast:
        print(f"  {k:<10} {Rng.backend:>8} {fast[k]:8.1f}   {PyRng.backend:>8} {slow[k]:8.1f}   x{slow[k] / fast[k]:.1f}")

    print(f"end-to-end (ms per run, {args.runs} runs)")
    for name, cfg in CONFIGS.items():
        b1, t1 = end_to_end(cfg, args.runs, pure=False)
        b2, t2 = end_to_end(cfg, args.runs, pure=True)
        print(f"  {name:<10} {b1:>8} {t1:8.2f}   {b2:>8} {t2:8.2f}   x{t2 / t1:.2f}")


if __name__ == "__main__":
    main()
