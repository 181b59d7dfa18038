"""Expected LCS of several random strings: exact DP, greedy matching,
analytic bounds and Monte Carlo estimates."""

__version__ = "0.1.0"

from .errors import LcsGammaError, ResourceError, ValidationError
from .strings import (Params, Seed, StringEnsemble, as_symbols, binary_filter, is_subsequence,
                      sample_ensemble, to_text)
from .lcs import (DiagonalResult, LcsResult, SuperCount, count_supersequences_bound,
                  count_supersequences_exact, diagonal_lcs, lcs_bruteforce, lcs_exact,
                  supersequence_count)
from .greedy import (CoinAnalytics, CoinProcessOutcome, GreedyResult, coin_analytics,
                     expected_flips, expected_minority, greedy_match, greedy_match_kary,
                     simulate_coin_process)
from .bounds import (BoundReport, bound_table, check_binomial_estimate, check_entropy_estimate,
                     entropy_q, lower_bound_binary, lower_bound_kary, upper_bound_bisect,
                     upper_bound_closed)
from .montecarlo import EstimateReport, concentration_probe, estimate_diagonal, estimate_gamma
from .codes import (Code, CodeCheckReport, check_list_decodable, proposition_sweep,
                    sample_code)
