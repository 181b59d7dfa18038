"""Analytic bounds on the normalized expected LCS of random strings.

Lower bounds come from the greedy matcher's rate ``d / E[Z]`` (binary) and
the ``2/k`` alphabet reduction.  Upper bounds come from a union bound over
all candidate common subsequences: at ratio ``x = ell/n`` the log-probability
per symbol, in base k, is ``x + d (H_k(1 - x) - 1)``.  The closed form picks
``x = (1 + eps)/k`` with ``eps = 4 sqrt(ln k / d)``; the bisection finds the
exact root of the exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ValidationError
from .greedy import expected_flips, expected_minority

BOUND_MARGIN = 1e-9
CLOSED_FORM_C0 = 16


def entropy_q(p: float, q: int) -> float:
    """q-ary entropy ``H_q(p)``, with ``0 log 0 = 0`` at the endpoints."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"entropy_q needs p in [0, 1], got {p}")
    if q < 2:
        raise ValidationError(f"entropy_q needs q >= 2, got {q}")
    p = float(p)
    ln_q = math.log(q)
    h = 0.0
    if p > 0.0:
        h += p * math.log(q - 1) - p * math.log(p)
    if p < 1.0:
        h -= (1.0 - p) * math.log1p(-p)
    return h / ln_q


def check_entropy_estimate(k: int, eps: float) -> bool:
    """``H_k(1 - 1/k - eps) <= 1 - (k / (4 ln k)) eps^2`` for ``0 < eps < 1/k``."""
    if not 0.0 < eps < 1.0 / k:
        raise ValidationError(f"need 0 < eps < 1/k, got eps={eps}, k={k}")
    lhs = entropy_q(1.0 - 1.0 / k - eps, k)
    rhs = 1.0 - k / (4.0 * math.log(k)) * eps * eps
    return lhs <= rhs + 1e-12


def check_binomial_estimate(m: int, p, q: int) -> bool:
    """``C(m, pm) (q-1)^(pm) <= q^(H_q(p) m)``.

    The left side is an exact integer; both sides are compared as natural
    logs with a relative margin of 1e-9, far above double rounding error.
    """
    p = Fraction(p)
    pm = p * m
    if pm.denominator != 1 or not 0 <= pm <= m:
        raise ValidationError(f"p*m must be an integer in [0, m], got {pm}")
    pm = int(pm)
    log_lhs = math.log(math.comb(m, pm) * (q - 1)**pm)
    log_rhs = m * entropy_q(float(p), q) * math.log(q)
    return log_lhs <= log_rhs + BOUND_MARGIN * max(1.0, abs(log_rhs))


def lower_bound_binary(d: int) -> float:
    """Greedy rate ``d / E[Z]``."""
    if d < 2:
        raise ValidationError(f"lower_bound_binary needs d >= 2, got {d}")
    return float(Fraction(d) / expected_flips(d))


def lower_bound_kary(k: int, d: int) -> float:
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")
    return 2.0 / k * lower_bound_binary(d)


def closed_form_epsilon(k: int, d: int) -> float:
    return 4.0 * math.sqrt(math.log(k) / d)


def closed_form_valid(k: int, d: int) -> bool:
    """``d > 16 log2 k``; implies ``eps < 1`` (which only needs ``d > 16 ln k``)."""
    return d > CLOSED_FORM_C0 * math.log2(k)


def upper_bound_closed(k: int, d: int) -> float:
    """``(1 + eps) / k``; meaningful only where :func:`closed_form_valid` holds."""
    if k < 2 or d < 1:
        raise ValidationError("upper_bound_closed needs k >= 2, d >= 1")
    return (1.0 + closed_form_epsilon(k, d)) / k


def union_bound_exponent(x: float, k: int, d: int) -> float:
    """Per-symbol base-k exponent ``x + d (H_k(1 - x) - 1)``."""
    return x + d * (entropy_q(1.0 - x, k) - 1.0)


def upper_bound_bisect(k: int, d: int, tol: float = 1e-9) -> float:
    """Root of :func:`union_bound_exponent` on ``(1/k, 1]``.

    The exponent is concave, positive just above ``1/k`` and equal to
    ``1 - d < 0`` at 1, so there is exactly one sign change.  Returns the
    upper end of the final bracket so the result never undershoots the root.
    """
    if k < 2 or d < 2:
        raise ValidationError(f"upper_bound_bisect needs k >= 2 and d >= 2, got k={k}, d={d}")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    lo, hi = 1.0 / k + 1e-6, 1.0
    if not (union_bound_exponent(lo, k, d) > 0 > union_bound_exponent(hi, k, d)):
        raise RuntimeError(f"bisection bracket failed for k={k}, d={d}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if union_bound_exponent(mid, k, d) < 0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class BoundReport:
    k: int
    d: int
    lower_binary: float
    lower_kary: float
    upper_closed: float
    upper_bisect: float
    expected_Y: Fraction
    expected_Z: Fraction
    epsilon: float
    flags: dict = field(default_factory=dict)

    CSV_COLUMNS = ("k", "d", "lower_binary", "lower_kary", "upper_bisect",
                   "upper_closed", "epsilon", "flags")

    def flag_text(self) -> str:
        return ";".join(f"{key}={val}" for key, val in self.flags.items())

    def as_row(self) -> dict:
        return {
            "k": self.k, "d": self.d,
            "lower_binary": self.lower_binary, "lower_kary": self.lower_kary,
            "upper_bisect": self.upper_bisect, "upper_closed": self.upper_closed,
            "epsilon": self.epsilon, "flags": self.flag_text(),
        }

    def as_dict(self) -> dict:
        out = self.as_row()
        out["flags"] = dict(self.flags)
        out["expected_Y"] = str(self.expected_Y)
        out["expected_Z"] = str(self.expected_Z)
        return out


def bound_report(k: int, d: int, tol: float = 1e-9) -> BoundReport:
    """All bounds for one ``(k, d)``.

    An inapplicable closed form is reported as the trivial bound 1.0 and
    flagged ``invalid``.
    """
    lower_binary = lower_bound_binary(d)
    eps = closed_form_epsilon(k, d)
    valid = closed_form_valid(k, d)
    flags = {
        "lower_binary": "valid" if k == 2 else "binary-only",
        "lower_kary": "valid",
        "upper_bisect": "valid",
        "upper_closed": "valid" if valid else "invalid",
        "eps_lt_1": "yes" if eps < 1 else "no",
    }
    return BoundReport(
        k=k, d=d,
        lower_binary=lower_binary,
        lower_kary=2.0 / k * lower_binary,
        upper_closed=upper_bound_closed(k, d) if valid else 1.0,
        upper_bisect=upper_bound_bisect(k, d, tol),
        expected_Y=expected_minority(d),
        expected_Z=expected_flips(d),
        epsilon=eps,
        flags=flags,
    )


def check_report(r: BoundReport):
    """Raise if a report breaks the sandwich or range invariants."""
    values = (r.lower_binary, r.lower_kary, r.upper_bisect, r.upper_closed)
    if not all(0.0 < v <= 1.0 + BOUND_MARGIN for v in values):
        raise RuntimeError(f"bound outside (0, 1] at k={r.k}, d={r.d}: {values}")
    if r.lower_kary > r.upper_bisect + BOUND_MARGIN:
        raise RuntimeError(f"lower_kary > upper_bisect at k={r.k}, d={r.d}")
    if r.flags["upper_closed"] == "valid" and r.upper_bisect > r.upper_closed + BOUND_MARGIN:
        raise RuntimeError(f"upper_bisect > upper_closed at k={r.k}, d={r.d}")


def bound_table(k_list, d_list, tol: float = 1e-9) -> list:
    """Reports for every ``(k, d)`` on the grid, ``k``-major, invariants checked."""
    for k in k_list:
        if k < 2:
            raise ValidationError(f"invalid grid: k={k} < 2")
    for d in d_list:
        if d < 2:
            raise ValidationError(f"invalid grid: d={d} < 2")
    reports = [bound_report(k, d, tol) for k in k_list for d in d_list]
    for r in reports:
        check_report(r)
    return reports


def empirical_envelopes(reports) -> dict:
    """Min/max of the scaled gaps over a grid of reports.

    ``binary_lower``/``binary_upper``: ``(bound - 1/2) sqrt(d)`` at ``k = 2``.
    ``kary_lower``: ``(k * lower_kary - 1) sqrt(d)``;
    ``kary_upper``: ``(k * upper_bisect - 1) sqrt(d / ln k)``.
    """
    def span(vals):
        vals = list(vals)
        return (min(vals), max(vals)) if vals else None

    binary = [r for r in reports if r.k == 2]
    return {
        "binary_lower": span((r.lower_binary - 0.5) * math.sqrt(r.d) for r in binary),
        "binary_upper": span((r.upper_bisect - 0.5) * math.sqrt(r.d) for r in binary),
        "kary_lower": span((r.k * r.lower_kary - 1) * math.sqrt(r.d) for r in reports),
        "kary_upper": span((r.k * r.upper_bisect - 1) * math.sqrt(r.d / math.log(r.k))
                           for r in reports),
    }
