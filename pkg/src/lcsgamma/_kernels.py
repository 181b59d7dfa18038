"""Compiled inner loops.  All kernels release the GIL so trial-level thread
pools run them in parallel."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def lcs_two_rows(a, b):
    """Length of LCS(a, b) using two rolling rows."""
    m = b.shape[0]
    prev = np.zeros(m + 1, np.int32)
    cur = np.zeros(m + 1, np.int32)
    for i in range(a.shape[0]):
        ai = a[i]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                x = prev[j]
                y = cur[j - 1]
                cur[j] = x if x > y else y
        prev, cur = cur, prev
    return prev[m]


@njit(cache=True, nogil=True)
def fill_table(syms, offsets, lengths, table, budget):
    """Fill the flat d-dimensional LCS table in row-major (mixed radix) order.

    ``table[pos]`` holds the LCS of the prefixes selected by the multi-index
    of ``pos``.  When ``budget >= 0`` also returns the max table value over
    cells whose indices sum to ``budget`` and the first flat position
    attaining it (``-1, -1`` otherwise).
    """
    d = lengths.shape[0]
    strides = np.empty(d, np.int64)
    s = 1
    for j in range(d - 1, -1, -1):
        strides[j] = s
        s *= lengths[j] + 1
    total = s
    diag = 0
    for j in range(d):
        diag += strides[j]

    idx = np.zeros(d, np.int64)
    idx_sum = 0
    best = -1
    best_pos = -1
    for pos in range(total):
        has_zero = False
        for j in range(d):
            if idx[j] == 0:
                has_zero = True
                break
        if has_zero:
            v = 0
        else:
            c = syms[offsets[0] + idx[0] - 1]
            same = True
            for j in range(1, d):
                if syms[offsets[j] + idx[j] - 1] != c:
                    same = False
                    break
            if same:
                v = table[pos - diag] + 1
            else:
                v = table[pos - strides[0]]
                for j in range(1, d):
                    w = table[pos - strides[j]]
                    if w > v:
                        v = w
        table[pos] = v
        if idx_sum == budget and v > best:
            best = v
            best_pos = pos
        # advance the multi-index, last coordinate fastest
        j = d - 1
        while j >= 0:
            idx[j] += 1
            idx_sum += 1
            if idx[j] <= lengths[j]:
                break
            idx_sum -= idx[j]
            idx[j] = 0
            j -= 1
    return best, best_pos


@njit(cache=True, nogil=True)
def greedy_rounds(strings, lengths, budget, tie_symbol):
    """Run the round-based majority matcher on binary strings.

    ``strings`` is a (d, L) uint8 array, row ``j`` valid up to ``lengths[j]``.
    Returns ``(rounds, majority, minority, cost, consumed, exhausted)`` where the
    per-round arrays have ``rounds`` valid entries and ``consumed`` counts
    only completed rounds.
    """
    d = strings.shape[0]
    cap = budget // d + 1 if d > 0 else 1
    majority = np.empty(cap, np.uint8)
    minority = np.empty(cap, np.int32)
    cost = np.empty(cap, np.int64)
    pos = np.zeros(d, np.int64)
    trial = np.zeros(d, np.int64)
    first = np.empty(d, np.uint8)
    total = 0
    rounds = 0
    exhausted = False
    while True:
        spent = 0
        stop = False
        ones = 0
        for j in range(d):
            trial[j] = pos[j]
        for j in range(d):
            if trial[j] >= lengths[j]:
                exhausted = True
                stop = True
                break
            if total + spent + 1 > budget:
                stop = True
                break
            first[j] = strings[j, trial[j]]
            trial[j] += 1
            spent += 1
            ones += first[j]
        if stop:
            break
        zeros = d - ones
        if ones > zeros:
            b = 1
        elif zeros > ones:
            b = 0
        else:
            b = tie_symbol
        y = zeros if b == 1 else ones
        for j in range(d):
            if first[j] == b:
                continue
            while True:
                if trial[j] >= lengths[j]:
                    exhausted = True
                    stop = True
                    break
                if total + spent + 1 > budget:
                    stop = True
                    break
                bit = strings[j, trial[j]]
                trial[j] += 1
                spent += 1
                if bit == b:
                    break
            if stop:
                break
        if stop:
            break
        majority[rounds] = b
        minority[rounds] = y
        cost[rounds] = spent
        rounds += 1
        total += spent
        for j in range(d):
            pos[j] = trial[j]
    return rounds, majority, minority, cost, pos, exhausted
