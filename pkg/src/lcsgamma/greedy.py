"""Round-based greedy matching of random binary strings and the coin process
that governs its consumption.

Each round reveals one symbol per string, takes the majority symbol ``b``
and advances every disagreeing string to its next ``b``.  The number of
symbols a round consumes is distributed as ``Z = d + W_1 + ... + W_Y`` where
``Y`` is the minority count of ``d`` fair coins and the ``W_i`` are
geometric(1/2) waiting times.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import ValidationError
from .strings import Seed, StringEnsemble, binary_filter, filter_positions

COIN_CHUNK = 1 << 16
MAX_EXTENSIONS = 64


@dataclass(frozen=True)
class CoinProcessOutcome:
    minority_count: int
    total_flips: int


@dataclass(frozen=True, eq=False)
class CoinSamples:
    """Columnar batch of coin-process outcomes; indexes like a list."""

    d: int
    minority: np.ndarray
    flips: np.ndarray

    def __len__(self):
        return self.minority.size

    def __getitem__(self, i):
        return CoinProcessOutcome(int(self.minority[i]), int(self.flips[i]))

    def __iter__(self):
        for y, z in zip(self.minority.tolist(), self.flips.tolist()):
            yield CoinProcessOutcome(y, z)

    def mean_flips(self) -> float:
        return float(self.flips.mean())

    def stderr_flips(self) -> float:
        return float(self.flips.std(ddof=1) / math.sqrt(len(self))) if len(self) > 1 else 0.0


@dataclass(frozen=True)
class CoinAnalytics:
    d: int
    expected_Y: Fraction
    expected_Z: Fraction
    c_hat: float


@dataclass(frozen=True, eq=False)
class GreedyResult:
    matched: np.ndarray
    consumed_per_string: tuple
    total_consumed: int
    budget: int
    exhausted: bool = False
    round_majority: np.ndarray | None = None
    round_minority: np.ndarray | None = None
    round_cost: np.ndarray | None = None

    @property
    def length(self) -> int:
        return int(self.matched.size)

    def trace_lines(self):
        """``round majority Y consumption cumulative`` for every completed round."""
        cumulative = 0
        for r, (b, y, c) in enumerate(zip(self.round_majority.tolist(),
                                          self.round_minority.tolist(),
                                          self.round_cost.tolist())):
            cumulative += c
            yield f"{r} {b} {y} {c} {cumulative}"


def expected_minority(d: int) -> Fraction:
    """Exact E[Y] for ``d`` fair coins."""
    if d < 1:
        raise ValidationError(f"d must be >= 1, got {d}")
    if d % 2 == 0:
        central = math.comb(d - 1, d // 2)
    else:
        central = math.comb(d - 1, (d - 1) // 2)
    return Fraction(d * (2**(d - 1) - central), 2**d)


def expected_flips(d: int) -> Fraction:
    """Exact E[Z] = d + 2 E[Y]; each geometric(1/2) waiting time has mean 2."""
    return d + 2 * expected_minority(d)


def coin_analytics(d: int) -> CoinAnalytics:
    ey = expected_minority(d)
    return CoinAnalytics(d, ey, expected_flips(d), float(Fraction(d, 2) - ey) / math.sqrt(d))


def _coin_chunk(d, seed, size):
    rng = seed.generator()
    heads = rng.integers(0, 2, size=(size, d), dtype=np.uint8).sum(axis=1, dtype=np.int64)
    minority = np.minimum(heads, d - heads)
    waits = rng.geometric(0.5, size=int(minority.sum()))
    owner = np.repeat(np.arange(size), minority)
    flips = d + np.bincount(owner, weights=waits, minlength=size).astype(np.int64)
    return minority, flips


def simulate_coin_process(d: int, seed: Seed, trials: int, workers: int = 1) -> CoinSamples:
    """Simulate ``trials`` independent rounds of the coin process.

    Trials are generated in fixed chunks of 65536, chunk ``c`` from
    ``seed.child(c)``, so the worker count never changes the output.
    Even ``d`` with an equal split counts ``d/2`` minority coins.
    """
    if d < 1 or trials < 1:
        raise ValidationError("simulate_coin_process needs d >= 1 and trials >= 1")
    sizes = [min(COIN_CHUNK, trials - start) for start in range(0, trials, COIN_CHUNK)]
    jobs = [(d, seed.child(c), size) for c, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(lambda job: _coin_chunk(*job), jobs))
    return CoinSamples(d, np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def _pack(strings):
    lengths = np.array([s.size for s in strings], dtype=np.int64)
    packed = np.zeros((len(strings), max(int(lengths.max(initial=0)), 1)), dtype=np.uint8)
    for j, s in enumerate(strings):
        packed[j, :s.size] = s
    return packed, lengths


def _run(strings, budget, tie_symbol):
    packed, lengths = _pack(strings)
    rounds, majority, minority, cost, pos, exhausted = _kernels.greedy_rounds(
        packed, lengths, budget, tie_symbol)
    return (majority[:rounds].copy(), minority[:rounds].copy(), cost[:rounds].copy(),
            tuple(int(p) for p in pos), bool(exhausted))


def greedy_match(ensemble: StringEnsemble, budget: int | None = None, tie_symbol: int = 0,
                 extend: bool = True) -> GreedyResult:
    """Greedy majority matching on a binary ensemble under a total reveal budget.

    ``budget`` defaults to ``n * d``.  A round whose reveals would push the
    total past ``budget`` is discarded.  Seeded ensembles that run dry are
    regenerated longer (prefixes are stable), so only explicit ensembles can
    report ``exhausted``.
    """
    if ensemble.k != 2:
        raise ValidationError("greedy_match needs a binary ensemble; use greedy_match_kary")
    if tie_symbol not in (0, 1):
        raise ValidationError("tie_symbol must be 0 or 1")
    if budget is None:
        budget = ensemble.params.n * ensemble.d
    if budget < 0:
        raise ValidationError("budget must be >= 0")
    ens = ensemble
    while True:
        majority, minority, cost, consumed, exhausted = _run(ens.strings, budget, tie_symbol)
        n = ens.params.n
        # a string longer than the budget can never run dry
        if not (exhausted and extend and ens.is_seeded and n < budget):
            break
        ens = ens.extended(min(max(2 * n, 1), budget))
    if exhausted and ens.is_seeded and ens.params.n >= budget:
        # running dry at this length means the budget was spent anyway
        exhausted = False
    return GreedyResult(majority, consumed, int(cost.sum()), budget, exhausted,
                        majority, minority, cost)


def greedy_match_kary(ensemble: StringEnsemble, budget: int | None = None, a: int = 0, b: int = 1,
                      tie_symbol: int = 0, extend: bool = False) -> GreedyResult:
    """Greedy matching on the ``{a, b}``-subsequences of a k-ary ensemble.

    The budget counts filtered symbols; consumption is reported as
    original-string positions (one past the last symbol used).  By default
    the originals are not extended, so the match is a common subsequence of
    the given strings and its rate tracks ``(2/k)`` times the binary rate.
    """
    if not (0 <= a < ensemble.k and 0 <= b < ensemble.k):
        raise ValidationError(f"symbols {a}, {b} outside alphabet [0, {ensemble.k})")
    if budget is None:
        budget = ensemble.params.n * ensemble.d
    ens = ensemble
    for _ in range(MAX_EXTENSIONS):
        filtered = [binary_filter(s, a, b) for s in ens.strings]
        majority, minority, cost, consumed, exhausted = _run(filtered, budget, tie_symbol)
        if not (exhausted and extend and ens.is_seeded):
            break
        ens = ens.extended(max(2 * ens.params.n, 1))
    original = []
    for s, c in zip(ens.strings, consumed):
        original.append(int(filter_positions(s, a, b)[c - 1]) + 1 if c else 0)
    return GreedyResult(majority, tuple(original), int(cost.sum()), budget, exhausted,
                        majority, minority, cost)
