"""Glue between a RunConfig and the engine / estimator."""

from .engine import simulate
from .smc import estimate


def run_config(cfg, seed, horizon=None, monitor=True, trace=False):
    h = cfg.horizon if horizon is None else horizon
    return simulate(cfg.model, cfg.delay, cfg.faults, cfg.event_map, h, seed, monitor=monitor, trace=trace)


def run_once(cfg, seed, horizon=None):
    """One run; returns the metric over the final log (may raise MetricError)."""
    result = run_config(cfg, seed, horizon)
    return cfg.metric.evaluate(result.log, cfg.model.metrics)


class RunTask:
    """Picklable ``seed -> metric`` closure over a config, for worker pools."""

    def __init__(self, config_dict, horizon=None):
        self.config_dict = config_dict
        self.horizon = horizon
        self._cfg = None

    def __getstate__(self):
        return {"config_dict": self.config_dict, "horizon": self.horizon, "_cfg": None}

    def __call__(self, seed):
        if self._cfg is None:
            from .config import RunConfig

            self._cfg = RunConfig.from_dict(self.config_dict)
        return run_once(self._cfg, seed, self.horizon)


def smc_config(cfg, params=None, jobs=1, horizon=None):
    params = params or cfg.smc
    return estimate(params, RunTask(cfg.to_dict(), horizon), jobs=jobs)
