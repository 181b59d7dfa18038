import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2_contingency

from lcsgamma import (Params, Seed, StringEnsemble, ValidationError, coin_analytics,
                      expected_flips, expected_minority, greedy_match, greedy_match_kary,
                      is_subsequence, sample_ensemble, simulate_coin_process, to_text)


def minority_by_enumeration(d):
    """Average of min(heads, tails) over all 2^d outcomes."""
    total = sum(min(bin(mask).count("1"), d - bin(mask).count("1")) for mask in range(2**d))
    return Fraction(total, 2**d)


@pytest.mark.parametrize("d,ey,ez", [(1, Fraction(0), Fraction(1)),
                                     (2, Fraction(1, 2), Fraction(3)),
                                     (3, Fraction(3, 4), Fraction(9, 2))])
def test_small_d_examples(d, ey, ez):
    assert expected_minority(d) == ey
    assert expected_flips(d) == ez


def test_closed_form_matches_enumeration():
    for d in range(1, 17):
        assert expected_minority(d) == minority_by_enumeration(d)


def test_flips_relation():
    for d in range(1, 65):
        assert expected_flips(d) == d + 2 * expected_minority(d)
        assert 0 <= expected_minority(d) <= Fraction(d, 2)


def test_c_hat_band_and_limit():
    for d in range(2, 1025):
        c = coin_analytics(d).c_hat
        assert 0.15 <= c <= 0.45
    for d in (512, 513, 777, 1024, 4096):
        assert abs(2 * coin_analytics(d).c_hat - math.sqrt(2 / math.pi)) <= 0.02


def test_coin_single_coin():
    samples = simulate_coin_process(1, Seed(3), 1000)
    assert all(o.minority_count == 0 and o.total_flips == 1 for o in samples)


def test_coin_two_coins():
    samples = simulate_coin_process(2, Seed(4), 10**6)
    assert abs(samples.minority.mean() - 0.5) <= 0.002
    assert abs(samples.mean_flips() - 3.0) <= 0.01


def test_coin_seven_coins():
    samples = simulate_coin_process(7, Seed(5), 10**6)
    assert abs(samples.mean_flips() - float(expected_flips(7))) <= 4 * samples.stderr_flips()


def test_coin_invariants():
    samples = simulate_coin_process(6, Seed(6), 5000)
    assert np.all(samples.minority <= 3)
    assert np.all(samples.flips >= 6 + samples.minority)
    assert samples[0] == next(iter(samples))


def test_coin_workers_do_not_change_output():
    a = simulate_coin_process(5, Seed(9), 200_000, workers=1)
    b = simulate_coin_process(5, Seed(9), 200_000, workers=4)
    assert np.array_equal(a.flips, b.flips) and np.array_equal(a.minority, b.minority)


def test_greedy_hand_trace():
    res = greedy_match(StringEnsemble.explicit(["0011", "0101"]), 8)
    assert to_text(res.matched) == "001"
    assert res.total_consumed == 7
    assert res.consumed_per_string == (3, 4)
    assert res.exhausted
    assert list(res.trace_lines()) == ["0 0 0 2 2", "1 0 1 3 5", "2 1 0 2 7"]


def test_greedy_identical_strings():
    res = greedy_match(StringEnsemble.explicit(["1111", "1111"]), 8)
    assert to_text(res.matched) == "1111"
    assert res.consumed_per_string == (4, 4)


def test_greedy_budget_discards_partial_round():
    res = greedy_match(StringEnsemble.explicit(["0011", "0101"]), 6)
    assert to_text(res.matched) == "00" and res.total_consumed == 5 and not res.exhausted


def test_greedy_rejects_kary():
    with pytest.raises(ValidationError):
        greedy_match(StringEnsemble.explicit(["012", "210"]))


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(0, 1), max_size=25), min_size=1, max_size=5),
       st.integers(0, 120), st.integers(0, 1))
def test_greedy_output_is_common_subsequence(strings, budget, tie):
    ens = StringEnsemble.explicit(strings, k=2)
    res = greedy_match(ens, budget, tie_symbol=tie)
    assert res.total_consumed <= budget
    assert res.total_consumed == sum(res.consumed_per_string)
    assert res.length <= lcs_len_upper(strings)
    for s, used in zip(ens.strings, res.consumed_per_string):
        assert is_subsequence(res.matched, s[:used])


def lcs_len_upper(strings):
    return min(len(s) for s in strings)


def test_greedy_rate_two_strings():
    n = 10**5
    ens = sample_ensemble(Params(2, 2, n), Seed(2024))
    res = greedy_match(ens, 2 * n)
    assert 0.656 <= res.length / n <= 0.677
    assert not res.exhausted


@pytest.mark.parametrize("d", [2, 3, 7, 16])
def test_round_cost_distributed_as_coin_process(d):
    rounds = 10**5
    budget = int(rounds * float(expected_flips(d)) * 1.05)
    ens = sample_ensemble(Params(2, d, budget // d), Seed(77).child(d))
    res = greedy_match(ens, budget)
    cost = res.round_cost
    assert cost.size >= rounds
    stderr = cost.std(ddof=1) / math.sqrt(cost.size)
    assert abs(cost.mean() - float(expected_flips(d))) <= 4 * stderr
    assert np.all(res.round_minority <= d // 2)


def test_tie_break_neutrality():
    n = 50_000
    ens = sample_ensemble(Params(2, 4, n), Seed(5150))
    zero = greedy_match(ens, 4 * n, tie_symbol=0)
    one = greedy_match(ens, 4 * n, tie_symbol=1)
    ties = min(np.count_nonzero(zero.round_minority == 2), np.count_nonzero(one.round_minority == 2))
    assert abs(zero.length - one.length) <= ties
    top = 30
    hist = np.array([np.bincount(np.minimum(r.round_cost, top), minlength=top + 1)
                     for r in (zero, one)])
    hist = hist[:, hist.sum(axis=0) > 0]
    assert chi2_contingency(hist)[1] > 1e-4


def test_kary_example():
    res = greedy_match_kary(StringEnsemble.explicit(["201", "021"], k=3), 4, 0, 1)
    assert to_text(res.matched) == "01"
    assert res.consumed_per_string == (3, 3)


def test_kary_identity_on_binary():
    ens = StringEnsemble.explicit(["0011010", "0101110", "1100101"])
    a = greedy_match(ens, 15)
    b = greedy_match_kary(ens, 15, 0, 1)
    assert np.array_equal(a.matched, b.matched)
    assert a.consumed_per_string == b.consumed_per_string
    seeded = sample_ensemble(Params(2, 3, 400), Seed(1))
    a = greedy_match(seeded, 1200, extend=False)
    b = greedy_match_kary(seeded, 1200)
    assert np.array_equal(a.matched, b.matched)


def test_kary_consumption_in_original_positions():
    ens = sample_ensemble(Params(5, 3, 300), Seed(13))
    res = greedy_match_kary(ens, 900, 2, 4)
    assert res.matched.size > 0
    for s, used in zip(ens.strings, res.consumed_per_string):
        prefix = s[:used]
        assert is_subsequence(np.where(res.matched == 1, 4, 2), prefix)


def test_kary_rate():
    n = 10**5
    ens = sample_ensemble(Params(4, 2, n), Seed(404))
    res = greedy_match_kary(ens, 2 * n)
    assert res.length / n >= 0.5 * 0.65


def test_seeded_ensemble_extends_on_demand():
    ens = sample_ensemble(Params(2, 3, 10), Seed(21))
    res = greedy_match(ens, 3000)
    assert not res.exhausted
    assert res.total_consumed > 2900
    longer = ens.extended(3000)
    for s, used in zip(longer.strings, res.consumed_per_string):
        assert is_subsequence(res.matched, s[:used])
