"""Seeded Monte Carlo estimates of normalized LCS quantities.

Trial ``i`` always draws its strings from ``seed.child(i)`` and the summary
is reduced in trial order, so results never depend on the worker count.
"""
from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import ValidationError
from .greedy import greedy_match, greedy_match_kary
from .lcs import DEFAULT_CELL_BUDGET, _check_cells, diagonal_lcs, lcs_exact
from .strings import Params, Seed, sample_ensemble

CI_LEVEL = 0.99
METHODS = ("exact-dp", "greedy")


@dataclass(frozen=True)
class EstimateReport:
    params: Params
    trials: int
    mean: float
    stddev: float
    ci_low: float
    ci_high: float
    normalized: bool
    master_seed: Seed
    wall_time: float
    method: str = "exact-dp"
    samples: tuple = ()

    def as_dict(self, timing: bool = False, samples: bool = False) -> dict:
        out = {
            "k": self.params.k, "d": self.params.d, "n": self.params.n,
            "method": self.method, "trials": self.trials,
            "mean": self.mean, "stddev": self.stddev,
            "ci_low": self.ci_low, "ci_high": self.ci_high,
            "ci_level": CI_LEVEL, "normalized": self.normalized,
            "seed": str(self.master_seed),
        }
        if timing:
            out["wall_time"] = self.wall_time
        if samples:
            out["samples"] = list(self.samples)
        return out


def hoeffding_halfwidth(trials: int, level: float = CI_LEVEL) -> float:
    """Half-width of a two-sided Hoeffding interval for means of [0, 1] variables."""
    return math.sqrt(math.log(2.0 / (1.0 - level)) / (2.0 * trials))


def map_trials(fn, trials: int, workers: int = 1) -> list:
    """``[fn(0), ..., fn(trials - 1)]`` on a thread pool, in trial order."""
    if workers <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def summarize(values, params, seed, method, started) -> EstimateReport:
    trials = len(values)
    mean = math.fsum(values) / trials
    stddev = statistics.stdev(values) if trials > 1 else 0.0
    hw = hoeffding_halfwidth(trials)
    return EstimateReport(
        params=params, trials=trials, mean=mean, stddev=stddev,
        ci_low=max(0.0, mean - hw), ci_high=min(1.0, mean + hw),
        normalized=True, master_seed=seed, wall_time=time.perf_counter() - started,
        method=method, samples=tuple(values))


def _validate(trials, method=None):
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    if method is not None and method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def estimate_gamma(params: Params, trials: int, seed: Seed, method: str = "exact-dp",
                   workers: int = 1, cell_budget: int = DEFAULT_CELL_BUDGET) -> EstimateReport:
    """Mean of LCS/n (``exact-dp``) or greedy matched length/n with budget ``n d``."""
    _validate(trials, method)
    started = time.perf_counter()
    n = params.n
    if method == "exact-dp" and params.d > 1:
        _check_cells([n] * params.d, cell_budget)

    def trial(i):
        if n == 0:
            return 0.0
        ens = sample_ensemble(params, seed.child(i))
        if method == "exact-dp":
            return lcs_exact(ens, cell_budget=cell_budget).length / n
        if params.k == 2:
            return greedy_match(ens, n * params.d).length / n
        return greedy_match_kary(ens, n * params.d).length / n

    return summarize(map_trials(trial, trials, workers), params, seed, method, started)


def estimate_diagonal(params: Params, budget: int, trials: int, seed: Seed, workers: int = 1,
                      cell_budget: int = DEFAULT_CELL_BUDGET) -> EstimateReport:
    """Mean diagonal LCS at ``budget``, normalized by ``budget / d``.

    Each trial uses strings of length ``budget`` so every split is feasible.
    Strings are prefix-stable, so trial ``i`` here extends trial ``i`` of
    :func:`estimate_gamma` under the same seed.
    """
    _validate(trials)
    if budget < 0:
        raise ValidationError("budget must be >= 0")
    started = time.perf_counter()
    run_params = Params(params.k, params.d, budget)
    _check_cells([budget] * params.d, cell_budget)
    scale = budget / params.d

    def trial(i):
        if budget == 0:
            return 0.0
        ens = sample_ensemble(run_params, seed.child(i))
        return diagonal_lcs(ens, budget, cell_budget).value / scale

    return summarize(map_trials(trial, trials, workers), run_params, seed, "diagonal", started)


def azuma_tail(eps: float, n: int) -> float:
    """``2 exp(-eps^2 n / 2)``."""
    return 2.0 * math.exp(-eps * eps * n / 2.0)


def concentration_limit(eps: float, n: int, trials: int) -> float:
    """Azuma tail plus three binomial standard errors at that tail."""
    tail = min(1.0, azuma_tail(eps, n))
    return tail + 3.0 * math.sqrt(tail * (1.0 - tail) / trials)


def concentration_probe(params: Params, trials: int, seed: Seed, eps: float, workers: int = 1,
                        report: EstimateReport | None = None) -> float:
    """Fraction of trials with ``|LCS/n - pooled mean| >= eps``.

    Pass an existing ``report`` (same params and seed) to reuse its samples.
    """
    if report is None:
        report = estimate_gamma(params, trials, seed, "exact-dp", workers)
    far = sum(1 for v in report.samples if abs(v - report.mean) >= eps)
    return far / report.trials
