"""Random codes and list-decodability against deletions.

A code is ``(p, d-1)`` list-decodable when every ``d`` distinct codewords
have ``LCS < (1 - p) n``.  The threshold is taken as the integer
``ceil((1 - p) n)``: exactly for rational ``p``, and with a 1e-9 guard
against rounding for floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import ResourceError, ValidationError
from .lcs import lcs_exact, table_cells
from .montecarlo import map_trials
from .strings import SYMBOL_DTYPE, Seed, StringEnsemble, as_symbols, to_text

DEFAULT_COMPUTE_BUDGET = 10**12
FLOAT_GUARD = 1e-9
MAX_SWEEP_N = 4000
MAX_SWEEP_SIZE = 64
MAX_SWEEP_D = 4


@dataclass(frozen=True, eq=False)
class Code:
    codewords: tuple
    k: int
    n: int
    seed: Seed | None = None

    def __post_init__(self):
        seen = set()
        for w in self.codewords:
            if w.size != self.n:
                raise ValidationError("all codewords must have length n")
            if w.size and w.max() >= self.k:
                raise ValidationError(f"codeword symbol outside [0, {self.k})")
            key = w.tobytes()
            if key in seen:
                raise ValidationError("codewords must be distinct")
            seen.add(key)

    @classmethod
    def explicit(cls, words, k: int = 2) -> "Code":
        arrs = tuple(np.array(as_symbols(w)) for w in words)
        n = arrs[0].size if arrs else 0
        return cls(arrs, k, n, None)

    @property
    def size(self) -> int:
        return len(self.codewords)

    def texts(self) -> list:
        return [to_text(w) for w in self.codewords]


@dataclass(frozen=True)
class CodeCheckReport:
    p: float
    d: int
    decodable: bool
    violation: tuple | None
    subsets_checked: int


@dataclass(frozen=True)
class SweepRow:
    size: int
    p: float
    decodable_fraction: float
    trials: int
    seed: str

    CSV_COLUMNS = ("size", "p", "decodable_fraction", "trials", "seed")


def sample_code(k: int, n: int, size: int, seed: Seed) -> Code:
    """``size`` distinct uniform codewords; candidate ``c`` comes from ``seed.child(c)``
    and duplicates are skipped."""
    if k < 2 or n < 0 or size < 0:
        raise ValidationError("sample_code needs k >= 2, n >= 0, size >= 0")
    if size > k**n:
        raise ValidationError(f"cannot draw {size} distinct codewords from {k}^{n} strings")
    words, seen = [], set()
    c = 0
    while len(words) < size:
        w = seed.child(c).generator().integers(0, k, size=n, dtype=SYMBOL_DTYPE)
        c += 1
        key = w.tobytes()
        if key not in seen:
            seen.add(key)
            words.append(w)
    return Code(tuple(words), k, n, seed)


def deletion_threshold(p, n: int) -> int:
    """Smallest LCS length that violates decodability: ``ceil((1 - p) n)``."""
    if isinstance(p, (int, Fraction)):
        return math.ceil((1 - Fraction(p)) * n)
    return math.ceil((1.0 - float(p)) * n - FLOAT_GUARD)


def _check_budget(code, d, compute_budget):
    subsets = math.comb(code.size, d)
    cost = subsets * table_cells([code.n] * d)
    if cost > compute_budget:
        raise ResourceError(
            f"{subsets} subsets of {d} codewords need {cost} DP cells; budget is {compute_budget}",
            required=cost, allowed=compute_budget)
    return subsets


def _subset_lcs(code, idx):
    return lcs_exact(StringEnsemble.explicit([code.codewords[i] for i in idx], k=code.k)).length


def check_list_decodable(code: Code, p, d: int,
                         compute_budget: int = DEFAULT_COMPUTE_BUDGET) -> CodeCheckReport:
    """Scan d-subsets in lexicographic order and stop at the first violation."""
    if d < 2:
        raise ValidationError(f"d must be >= 2, got {d}")
    if not 0 < float(p) < 1:
        raise ValidationError(f"p must lie in (0, 1), got {p}")
    _check_budget(code, d, compute_budget)
    threshold = deletion_threshold(p, code.n)
    checked = 0
    for idx in combinations(range(code.size), d):
        checked += 1
        value = _subset_lcs(code, idx)
        if value >= threshold:
            return CodeCheckReport(float(p), d, False, (idx, value), checked)
    return CodeCheckReport(float(p), d, True, None, checked)


def max_subset_lcs(code: Code, d: int, compute_budget: int = DEFAULT_COMPUTE_BUDGET):
    """``(max LCS over all d-subsets, first subset attaining it)``; ``(-1, None)`` if size < d."""
    _check_budget(code, d, compute_budget)
    best, arg = -1, None
    for idx in combinations(range(code.size), d):
        value = _subset_lcs(code, idx)
        if value > best:
            best, arg = value, idx
    return best, arg


def decodable_from_max(max_lcs: int, p, n: int) -> bool:
    return max_lcs < deletion_threshold(p, n)


def proposition_sweep(k: int, n: int, d: int, sizes, p_grid, trials: int, seed: Seed,
                      workers: int = 1, compute_budget: int = DEFAULT_COMPUTE_BUDGET) -> list:
    """Decodable fraction of random codes for every ``(size, p)`` cell.

    Codes for size ``s`` come from ``seed.child(s).child(t)``; each code's
    max subset LCS is computed once and answers the whole ``p`` grid.
    """
    if n > MAX_SWEEP_N or d > MAX_SWEEP_D or any(s > MAX_SWEEP_SIZE for s in sizes):
        raise ValidationError(
            f"sweep limited to n <= {MAX_SWEEP_N}, d <= {MAX_SWEEP_D}, sizes <= {MAX_SWEEP_SIZE}")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    for s in sizes:
        if s >= d:
            cost = trials * math.comb(s, d) * table_cells([n] * d)
            if cost > compute_budget:
                raise ResourceError(f"sweep cell for size {s} needs {cost} DP cells; "
                                    f"budget is {compute_budget}", required=cost, allowed=compute_budget)
    rows = []
    for s in sizes:
        def trial(t, s=s):
            if s < d:
                return -1
            return max_subset_lcs(sample_code(k, n, s, seed.child(s).child(t)), d, compute_budget)[0]

        maxima = map_trials(trial, trials, workers)
        for p in p_grid:
            ok = sum(1 for m in maxima if decodable_from_max(m, p, n))
            rows.append(SweepRow(s, float(p), ok / trials, trials, str(seed)))
    return rows
