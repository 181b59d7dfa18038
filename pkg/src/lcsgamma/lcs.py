"""Exact multi-string LCS, a brute-force oracle, the diagonal LCS, and
supersequence counting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ResourceError, ValidationError
from .strings import StringEnsemble, SymbolsLike, as_symbols, is_subsequence

DEFAULT_CELL_BUDGET = 10**8
EXACT_COUNT_MAX_N = 64


@dataclass(frozen=True)
class LcsResult:
    length: int
    witness: np.ndarray | None = None


@dataclass(frozen=True)
class DiagonalResult:
    budget: int
    value: int
    argmax_split: tuple


@dataclass(frozen=True)
class SuperCount:
    """Supersequence count of a length-``ell`` string among k-ary length-``n`` strings.

    ``exact`` is ``None`` beyond ``n = 64``; ``log_exact`` is always set.
    ``bound`` is the natural log of the closed-form upper bound, or ``None``
    outside its region ``ell > n/k``.
    """

    ell: int
    n: int
    k: int
    exact: int | None
    log_exact: float
    bound: float | None

    @property
    def bound_holds(self) -> bool | None:
        if self.bound is None:
            return None
        return self.log_exact <= self.bound + 1e-12 * max(1.0, abs(self.bound))


def _coerce(ensemble) -> StringEnsemble:
    if isinstance(ensemble, StringEnsemble):
        return ensemble
    return StringEnsemble.explicit(ensemble)


def table_cells(lengths: Sequence[int]) -> int:
    return math.prod(n + 1 for n in lengths)


def _check_cells(lengths, cell_budget):
    cells = table_cells(lengths)
    if cells > cell_budget:
        raise ResourceError(
            f"LCS table needs {cells} cells but the cell budget allows {cell_budget}",
            required=cells, allowed=cell_budget)
    return cells


def _table(strings, cell_budget, budget=-1):
    lengths = np.array([s.size for s in strings], dtype=np.int64)
    cells = _check_cells(lengths.tolist(), cell_budget)
    syms = np.concatenate(strings) if strings else np.zeros(0, np.uint8)
    offsets = np.zeros(len(strings), dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)[:-1]
    # LCS never exceeds the shortest string
    dtype = np.uint16 if lengths.min() < 2**16 else np.int64
    table = np.empty(cells, dtype=dtype)
    best, best_pos = _kernels.fill_table(syms, offsets, lengths, table, budget)
    return table.reshape(tuple(int(n) + 1 for n in lengths)), int(best), int(best_pos)


def _backtrack(table, strings):
    idx = [s.size for s in strings]
    d = len(strings)
    out = []
    while all(idx) and table[tuple(idx)] > 0:
        c = strings[0][idx[0] - 1]
        if all(s[i - 1] == c for s, i in zip(strings, idx)):
            out.append(c)
            idx = [i - 1 for i in idx]
            continue
        here = table[tuple(idx)]
        for j in range(d):
            idx[j] -= 1
            if table[tuple(idx)] == here:
                break
            idx[j] += 1
    return np.array(out[::-1], dtype=np.uint8)


def lcs_exact(ensemble, want_witness: bool = False,
              cell_budget: int = DEFAULT_CELL_BUDGET) -> LcsResult:
    """LCS of all strings by the d-dimensional dynamic program.

    The full table is stored as one flat mixed-radix array; for two strings
    without a witness only two rows are kept.
    """
    ens = _coerce(ensemble)
    strings = [np.ascontiguousarray(s) for s in ens.strings]
    if ens.d == 1:
        s = strings[0]
        return LcsResult(s.size, s.copy() if want_witness else None)
    _check_cells([s.size for s in strings], cell_budget)
    if ens.d == 2 and not want_witness:
        return LcsResult(int(_kernels.lcs_two_rows(strings[0], strings[1])))
    table, _, _ = _table(strings, cell_budget)
    length = int(table.flat[-1])
    return LcsResult(length, _backtrack(table, strings) if want_witness else None)


def lcs_bruteforce(ensemble, max_len: int = 14, max_candidates: int = 10**7) -> LcsResult:
    """Try every subsequence of the shortest string, longest first."""
    ens = _coerce(ensemble)
    strings = [s.tolist() for s in ens.strings]
    shortest = min(strings, key=len)
    m = len(shortest)
    if m > max_len or ens.k**m > max_candidates:
        raise ResourceError(
            f"brute force needs min length <= {max_len} and k^m <= {max_candidates}; "
            f"got m={m}, k={ens.k}", required=ens.k**m, allowed=max_candidates)
    for size in range(m, -1, -1):
        seen = set()
        for picks in combinations(range(m), size):
            cand = tuple(shortest[i] for i in picks)
            if cand in seen:
                continue
            seen.add(cand)
            if all(is_subsequence(cand, s) for s in strings):
                return LcsResult(size, np.array(cand, dtype=np.uint8))
    raise AssertionError("unreachable: the empty string is always common")


def diagonal_lcs(ensemble, budget: int, cell_budget: int = DEFAULT_CELL_BUDGET) -> DiagonalResult:
    """Max over prefix splits ``i_1 + ... + i_d = budget`` of the prefix LCS."""
    ens = _coerce(ensemble)
    if budget < 0 or budget > sum(ens.lengths):
        raise ValidationError(f"budget {budget} outside [0, {sum(ens.lengths)}]")
    # cells with some index above budget can never lie on the hyperplane
    strings = [np.ascontiguousarray(s[:budget]) for s in ens.strings]
    table, best, best_pos = _table(strings, cell_budget, budget)
    split = np.unravel_index(best_pos, table.shape)
    return DiagonalResult(budget, best, tuple(int(i) for i in split))


def count_supersequences_exact(ell: int, n: int, k: int) -> int:
    """Number of k-ary length-``n`` strings containing a fixed length-``ell`` string.

    Classify each such string by the position ``t`` where the leftmost
    embedding ends: ``sum_t C(t-1, ell-1) k^(n-t) (k-1)^(t-ell)``.
    """
    if not 0 <= ell <= n:
        raise ValidationError(f"need 0 <= ell <= n, got ell={ell}, n={n}")
    if ell == 0:
        return k**n
    return sum(math.comb(t - 1, ell - 1) * k**(n - t) * (k - 1)**(t - ell)
               for t in range(ell, n + 1))


def log_count_supersequences(ell: int, n: int, k: int) -> float:
    """Natural log of :func:`count_supersequences_exact`, via log-sum-exp."""
    if ell == 0:
        return n * math.log(k)
    terms = [_log_comb(t - 1, ell - 1) + (n - t) * math.log(k) + (t - ell) * math.log(k - 1)
             for t in range(ell, n + 1)]
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def _log_comb(a, b):
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def count_supersequences_bound(ell: int, n: int, k: int) -> float:
    """``ln(n * C(n-1, ell-1) * (k-1)^(n-ell))``, valid for ``ell > n/k``."""
    if not (ell * k > n and 1 <= ell <= n):
        raise ValidationError(f"bound requires n/k < ell <= n, got ell={ell}, n={n}, k={k}")
    return math.log(n) + _log_comb(n - 1, ell - 1) + (n - ell) * math.log(k - 1)


def supersequence_count(ell: int, n: int, k: int) -> SuperCount:
    exact = count_supersequences_exact(ell, n, k) if n <= EXACT_COUNT_MAX_N else None
    log_exact = math.log(exact) if exact is not None else log_count_supersequences(ell, n, k)
    bound = count_supersequences_bound(ell, n, k) if (ell * k > n and ell >= 1) else None
    return SuperCount(ell, n, k, exact, log_exact, bound)


def prefix_supersequence_counts(w: SymbolsLike, n: int, k: int) -> list:
    """Entry ``l`` counts the length-``n`` strings containing ``w[:l]``, by direct
    scan of all ``k**n`` strings; an independent oracle for the counting formula."""
    w = as_symbols(w)
    if n == 0:
        return [1] + [0] * w.size
    # all k^n strings as rows, scanned column by column with a greedy match pointer
    grid = np.indices((k,) * n, dtype=np.uint8).reshape(n, -1)
    ptr = np.zeros(grid.shape[1], dtype=np.int64)
    wpad = np.append(w.astype(np.int64), -1)
    for col in grid:
        ptr += col == wpad[ptr]
    hist = np.bincount(ptr, minlength=w.size + 1)
    return [int(c) for c in hist[::-1].cumsum()[::-1]]


def count_supersequences_enumerate(w: SymbolsLike, n: int, k: int) -> int:
    """Number of length-``n`` strings containing ``w``, by enumeration."""
    w = as_symbols(w)
    if w.size > n:
        return 0
    return prefix_supersequence_counts(w, n, k)[-1]
