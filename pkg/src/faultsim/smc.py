"""Monte-Carlo estimation of an expected metric to a given confidence and width.

Run ``i`` uses ``derive_seed(base_seed, i)``. After ``min_runs`` successful
runs the estimator checks, after every further attempt, whether the Student-t
half-width at level ``1 - alpha`` is at most ``delta / 2``, and stops there
or at ``max_runs`` attempts. Runs whose metric is undefined are counted as
failures and left out of the mean.

Parallel execution evaluates the same stopping rule over results taken in
seed order, so the estimate does not depend on the worker count.
"""

import math
from functools import lru_cache
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from scipy.stats import t as student_t

from .monitor import MetricError
from .rng import derive_seed


class SmcError(RuntimeError):
    pass


@dataclass(frozen=True)
class SmcParams:
    alpha: float = 0.05
    delta: float = 0.01
    min_runs: int = 30
    max_runs: int = 100_000
    base_seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"smc.alpha: must lie in (0,1), got {self.alpha}")
        if not self.delta > 0:
            raise ValueError(f"smc.delta: must be > 0, got {self.delta}")
        if self.min_runs < 2:
            raise ValueError(f"smc.min_runs: must be >= 2, got {self.min_runs}")
        if self.max_runs < self.min_runs:
            raise ValueError(f"smc.max_runs: must be >= min_runs ({self.min_runs}), got {self.max_runs}")
        if not 0 <= self.base_seed < 1 << 64:
            raise ValueError("smc.base_seed: must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data, path="smc"):
        if not isinstance(data, dict):
            raise ValueError(f"{path}: expected an object")
        unknown = set(data) - {"alpha", "delta", "min_runs", "max_runs", "base_seed"}
        if unknown:
            raise ValueError(f"{path}: unknown field(s) {sorted(unknown)}")
        kw = {}
        for key, kind in (("alpha", float), ("delta", float), ("min_runs", int), ("max_runs", int), ("base_seed", int)):
            if key in data:
                value = data[key]
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"{path}.{key}: expected a number, got {value!r}")
                if kind is int and value != int(value):
                    raise ValueError(f"{path}.{key}: expected an integer, got {value!r}")
                kw[key] = kind(value)
        return cls(**kw)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "delta": self.delta,
            "min_runs": self.min_runs,
            "max_runs": self.max_runs,
            "base_seed": self.base_seed,
        }


@dataclass
class Estimate:
    mean: float
    runs: int
    half_width: float
    converged: bool
    failures: int = 0
    alpha: float = 0.05
    delta: float = 0.01
    per_run: list = field(default_factory=list)  # (index, seed, value or None)

    def values(self):
        return [v for _, _, v in self.per_run if v is not None]

    def to_dict(self):
        return {
            "mean": self.mean,
            "runs": self.runs,
            "half_width": self.half_width,
            "converged": self.converged,
            "failures": self.failures,
            "alpha": self.alpha,
            "delta": self.delta,
            "per_run": [{"index": i, "seed": s, "value": v} for i, s, v in self.per_run],
        }


@lru_cache(maxsize=65536)
def t_quantile(alpha, df):
    return float(student_t.ppf(1 - alpha / 2, df))


def half_width(n, var, alpha):
    if n < 2:
        return math.inf
    return t_quantile(alpha, n - 1) * math.sqrt(var / n)


class _Running:
    """Welford accumulator."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, x):
        self.n += 1
        d = x - self.mean
        self.mean += d / self.n
        self.m2 += d * (x - self.mean)

    @property
    def var(self):
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0


def _attempt(run_once, seed):
    try:
        return float(run_once(seed)), None
    except MetricError as exc:
        return None, str(exc)


class _Accumulator:
    def __init__(self, params):
        self.params = params
        self.acc = _Running()
        self.per_run = []
        self.failures = 0
        self.hw = math.inf
        self.done = False

    def feed(self, index, seed, value):
        p = self.params
        self.per_run.append((index, seed, value))
        if value is None:
            self.failures += 1
        else:
            self.acc.add(value)
        if self.acc.n >= p.min_runs and value is not None:
            self.hw = half_width(self.acc.n, self.acc.var, p.alpha)
            if self.hw <= p.delta / 2:
                self.done = True
        if len(self.per_run) >= p.max_runs:
            self.done = True
        return self.done

    def result(self):
        p = self.params
        if self.acc.n == 0:
            raise SmcError(f"zero successful runs out of {len(self.per_run)}")
        if self.acc.n >= 2:
            self.hw = half_width(self.acc.n, self.acc.var, p.alpha)
        converged = self.acc.n >= p.min_runs and self.hw <= p.delta / 2
        return Estimate(
            mean=self.acc.mean,
            runs=self.acc.n,
            half_width=self.hw,
            converged=converged,
            failures=self.failures,
            alpha=p.alpha,
            delta=p.delta,
            per_run=self.per_run,
        )


def estimate(params, run_once, jobs=1, batch=None):
    """Estimate E[run_once(seed)] per ``params``.

    ``run_once`` maps a 64-bit seed to a metric value and may raise
    :class:`MetricError` for runs where the metric is undefined. With
    ``jobs > 1`` it must be picklable.
    """
    state = _Accumulator(params)
    if jobs <= 1:
        i = 0
        while not state.done:
            seed = derive_seed(params.base_seed, i)
            value, _ = _attempt(run_once, seed)
            state.feed(i, seed, value)
            i += 1
        return state.result()

    batch = batch or max(jobs * 8, params.min_runs)
    i = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        while not state.done:
            n = min(batch, params.max_runs - i)
            seeds = [derive_seed(params.base_seed, i + k) for k in range(n)]
            results = list(pool.map(_attempt, [run_once] * n, seeds, chunksize=max(1, n // (jobs * 4))))
            for k, (value, _) in enumerate(results):
                # anything past the stopping point is discarded
                if state.feed(i + k, seeds[k], value):
                    break
            i += n
    return state.result()


__all__ = ["Estimate", "SmcError", "SmcParams", "estimate", "half_width"]
