"""Iteration bounds for greedy PI and their check against traces.

The improved bound is evaluated in its explicit finite-n form::

    k^n / n^2  +  k^n / ((k-1)/k * n - sqrt(n ln n))

capped at the trivial k^n.  The first term counts policies with few
improvement states (binomial tail via Hoeffding with f(n) = sqrt(n ln n));
the second counts steps with many, each of which jumps over at least
(k-1)/k * n - f(n) policies.
"""

import decimal
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .analysis import Violation, ViolationReport

PRECISION = 60


def _ctx():
    return decimal.Context(prec=PRECISION)


@dataclass(frozen=True)
class BoundBreakdown:
    n: int
    k: int
    f_n: Decimal
    small_set_count_bound: Decimal
    large_set_count_bound: Decimal
    total_bound: Decimal
    fallback_used: bool

    def rows(self):
        return [
            ("n", self.n),
            ("k", self.k),
            ("f(n) = sqrt(n ln n)", self.f_n),
            ("small improvement sets <=", self.small_set_count_bound),
            ("large improvement sets <=", self.large_set_count_bound),
            ("total bound", self.total_bound),
            ("capped at k^n", self.fallback_used),
        ]


def mansour_singh_bound(n, k):
    if n < 1 or k < 2:
        raise ValueError(f"need n >= 1 and k >= 2, got n={n}, k={k}")
    return Fraction(13 * k ** n, n)


def f_of_n(n):
    ctx = _ctx()
    n = Decimal(n)
    return ctx.sqrt(ctx.multiply(n, ctx.ln(n)))


def hoeffding_tail(n, k=2):
    """exp(-2 f(n)^2 / n) with f(n) = sqrt(n ln n), which is exactly 1/n^2.

    ``k`` does not enter the tail; it is accepted for symmetry with the
    other bound functions.
    """
    if n < 2:
        raise ValueError(f"tail bound needs n >= 2, got {n}")
    return Fraction(1, n * n)


def improved_bound(n, k):
    if n < 1 or k < 2:
        raise ValueError(f"need n >= 1 and k >= 2, got n={n}, k={k}")
    ctx = _ctx()
    total_policies = Decimal(k ** n)
    f_n = f_of_n(n)
    # the 1/n^2 tail also holds at n = 1, where it is the trivial bound 1
    small = ctx.divide(total_policies, Decimal(n * n))
    denom = ctx.subtract(ctx.divide(Decimal((k - 1) * n), Decimal(k)), f_n)
    if denom <= 0:
        large = Decimal("Infinity")
    else:
        large = ctx.divide(total_policies, denom)
    raw = ctx.add(small, large)
    fallback = raw > total_policies
    total = total_policies if fallback else raw
    return BoundBreakdown(n, k, f_n, small, large, total, fallback)


def asymptotic_ratio(n, k):
    """improved_bound * n / k^n divided by k/(k-1); tends to 1 as n grows."""
    b = improved_bound(n, k)
    ctx = _ctx()
    return ctx.divide(ctx.multiply(b.total_bound, Decimal(n * (k - 1))), Decimal(k ** (n + 1)))


def integer_cap(bound):
    """Largest integer trace length allowed by a real bound, rounded up."""
    # one unit of slack in the last place before taking the ceiling
    slack = bound.copy_abs().scaleb(-PRECISION + 2) if bound.is_finite() else Decimal(0)
    return int((bound + slack).to_integral_value(rounding=decimal.ROUND_CEILING))


def validate_trace_bounds(trace_or_length, n=None, k=None):
    """Trace length against k^n, Mansour-Singh and the improved bound."""
    if isinstance(trace_or_length, int):
        length = trace_or_length
    else:
        length = len(trace_or_length)
        n, k = trace_or_length.n, trace_or_length.k
    report = ViolationReport()
    if length > k ** n:
        report.violations.append(Violation((), "trivial-bound", f"length {length} > k^n = {k ** n}"))
    ms = mansour_singh_bound(n, k)
    if length > ms:
        report.violations.append(Violation((), "mansour-singh", f"length {length} > 13 k^n / n = {ms}"))
    cap = integer_cap(improved_bound(n, k).total_bound)
    if length > cap:
        report.violations.append(Violation((), "improved-bound", f"length {length} > improved bound {cap}"))
    return report


def improvement_threshold(k=2, n_max=2000):
    """Smallest N such that the improved bound beats 13 k^n / n for all N <= n <= n_max."""
    threshold = None
    for n in range(n_max, 0, -1):
        b = improved_bound(n, k).total_bound
        if b < Decimal(13 * k ** n) / Decimal(n):
            threshold = n
        else:
            break
    return threshold
