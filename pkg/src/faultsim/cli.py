"""Command-line front end: ``faultsim simulate | smc | list-faults``."""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace

from .config import ConfigError, RunConfig, load_config, set_path
from .core import SimulationError
from .faults import Behavior
from .monitor import MetricError
from .runner import run_config, smc_config
from .smc import SmcError, SmcParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNCONVERGED = 0, 1, 2, 3


def _json_default(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    return str(value)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=False)


def _finite(obj):
    """JSON has no inf/nan; spell them as strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def _load(args):
    if not args.config:
        raise ConfigError("--config: required")
    if not args.overrides:
        return load_config(args.config)
    with open(args.config) as fh:
        data = json.load(fh)
    for item in args.overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set: expected KEY=JSON, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        set_path(data, key, value)
    return RunConfig.from_dict(data)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def cmd_simulate(args):
    cfg = _load(args)
    seed = args.seed if args.seed is not None else (cfg.smc.base_seed if cfg.smc else 0)
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    if horizon is None and not cfg.model.quiescent:
        raise ConfigError("--horizon: required for this model")
    result = run_config(cfg, seed, horizon)
    record = {
        "seed": seed,
        "model": cfg.model_name,
        "horizon": horizon,
        "clock": result.clock,
        "steps": result.steps,
        "counters": result.counters.to_dict(),
        "events": len(result.log),
        "metric": {"name": cfg.metric.name, "params": cfg.metric.params},
    }
    # an undefined metric (e.g. nothing completed before the horizon) is a
    # result, not a failed run; engine errors still exit nonzero
    try:
        record["metric"]["value"] = cfg.metric.evaluate(result.log, cfg.model.metrics)
    except MetricError as exc:
        record["metric"]["value"] = None
        record["metric"]["error"] = str(exc)
    if args.out:
        log_path = args.log or f"{os.path.splitext(args.out)[0]}.events.jsonl"
        _write(log_path, result.log.to_jsonl())
        record["event_log"] = log_path
    elif args.log:
        _write(args.log, result.log.to_jsonl())
        record["event_log"] = args.log
    text = _dump(_finite(record)) + "\n"
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    if record["metric"]["value"] is None:
        print(f"faultsim: metric undefined for this run: {record['metric']['error']}", file=sys.stderr)
    return EXIT_OK


def cmd_smc(args):
    cfg = _load(args)
    params = cfg.smc or SmcParams()
    changes = {}
    if args.alpha is not None:
        changes["alpha"] = args.alpha
    if args.delta is not None:
        changes["delta"] = args.delta
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if args.max_runs is not None:
        changes["max_runs"] = args.max_runs
        if args.max_runs < params.min_runs:
            changes["min_runs"] = max(2, args.max_runs)
    try:
        params = replace(params, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc).replace("smc.", "--", 1).replace("_", "-")) from None
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    if horizon is None and not cfg.model.quiescent:
        raise ConfigError("--horizon: required for this model")
    est = smc_config(cfg, params, jobs=args.jobs, horizon=horizon)
    out = est.to_dict()
    out["model"] = cfg.model_name
    out["metric"] = cfg.metric.to_dict()
    out["params"] = params.to_dict()
    text = _dump(_finite(out)) + "\n"
    if args.out:
        _write(args.out, text)
    summary = {k: out[k] for k in ("mean", "runs", "half_width", "converged", "failures", "alpha", "delta")}
    sys.stdout.write(_dump(_finite(summary)) + "\n")
    if args.emit_csv:
        label = args.param if args.param is not None else ";".join(args.overrides or []) or args.config
        new = not os.path.exists(args.emit_csv) or os.path.getsize(args.emit_csv) == 0
        with open(args.emit_csv, "a", newline="") as fh:
            w = csv.writer(fh)
            if new:
                w.writerow(["param", "mean", "half_width"])
            w.writerow([label, repr(est.mean), repr(est.half_width)])
    if args.runs_csv:
        with open(args.runs_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "seed", "value"])
            for i, s, v in est.per_run:
                w.writerow([i, s, "" if v is None else repr(v)])
    if args.strict and not est.converged:
        print("faultsim: estimate did not converge", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def format_faults():
    lines = []
    for b in Behavior:
        lines.append(f"{b.value:<15} level {b.level}  {b.description}")
    return "\n".join(lines) + "\n"


def cmd_list_faults(args):
    sys.stdout.write(format_faults())
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="faultsim", description="Fault-injecting discrete-event simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", metavar="PATH", help="run config (JSON)")
        sp.add_argument("--seed", type=int, help="run seed (simulate) or base seed (smc)")
        sp.add_argument("--horizon", type=float, metavar="T", help="simulated-time bound")
        sp.add_argument("--out", metavar="PATH", help="write the JSON result here")
        sp.add_argument(
            "--set",
            dest="overrides",
            action="append",
            metavar="KEY=JSON",
            help="override a config value by dotted path, e.g. faults.msg-loss.rate=0.2",
        )

    s = sub.add_parser("simulate", help="run one simulation")
    common(s)
    s.add_argument("--log", metavar="PATH", help="event log path (default: next to --out)")
    s.set_defaults(func=cmd_simulate)

    m = sub.add_parser("smc", help="estimate the expected metric")
    common(m)
    m.add_argument("--alpha", type=float, metavar="A")
    m.add_argument("--delta", type=float, metavar="D")
    m.add_argument("--max-runs", type=int, metavar="N")
    m.add_argument("--jobs", type=int, default=1, metavar="N")
    m.add_argument("--emit-csv", metavar="PATH", help="append a (param, mean, half_width) row")
    m.add_argument("--param", help="param column for --emit-csv (default: the --set overrides)")
    m.add_argument("--runs-csv", metavar="PATH", help="write per-run values")
    m.add_argument("--strict", action="store_true", help="exit nonzero if not converged")
    m.set_defaults(func=cmd_smc)

    lf = sub.add_parser("list-faults", help="list fault behaviors and priority levels")
    lf.set_defaults(func=cmd_list_faults)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"faultsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SimulationError, SmcError) as exc:
        print(f"faultsim: run failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
