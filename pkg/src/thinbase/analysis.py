"""Counting functions, growth ratios and spacing statistics on finite prefixes.

Sequence indices here are 0-based positions in the supplied sequence, so for
a basis starting at 0 the element a_k is the k-th positive element and
``counting(A, a_k) == k``.

Ratios involving a root, such as A(x)/x^(1/h), are irrational in general.
They are compared exactly by raising both sides to the h-th power, and are
reported as rationals rounded down to ``precision`` decimal places. All other
ratios are exact :class:`~fractions.Fraction` values.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .constructions import CasselsResult, OrderHResult

DEFAULT_PRECISION = 20


def counting(A: Sequence[int], x: int) -> int:
    """|A ∩ [1, x]|; zero is never counted."""
    if x < 1:
        return 0
    return bisect_right(A, x) - bisect_right(A, 0)


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def root_ratio(p: int, r: int, e: int, h: int, precision: int = DEFAULT_PRECISION) -> Fraction:
    """p / r^(e/h) rounded down to ``precision`` decimal places (p >= 0, r > 0)."""
    scale = 10**precision
    return Fraction(iroot((p * scale) ** h // r**e, h), scale)


def root_ratio_cmp(p: int, r: int, e: int, h: int, t: Fraction) -> int:
    """Sign of p / r^(e/h) - t, computed exactly."""
    t = Fraction(t)
    if t < 0:
        return 1
    if t == 0:
        return int(p > 0)
    lhs = Fraction(p) ** h
    rhs = t**h * Fraction(r) ** e
    return (lhs > rhs) - (lhs < rhs)


@dataclass
class GrowthMetrics:
    h: int
    precision: int
    samples: list[tuple[int, int, Fraction]] = field(default_factory=list)
    element_ratios: list[tuple[int, int, Fraction]] = field(default_factory=list)
    gap_power: list[tuple[int, Fraction]] = field(default_factory=list)
    gap_index: list[tuple[int, Fraction]] = field(default_factory=list)

    def max_count_ratio(self) -> Optional[tuple[int, Fraction]]:
        if not self.samples:
            return None
        x, _, r = max(self.samples, key=lambda s: s[2])
        return x, r

    def min_element_ratio(self) -> Optional[tuple[int, Fraction]]:
        if not self.element_ratios:
            return None
        k, _, r = min(self.element_ratios, key=lambda s: s[2])
        return k, r

    def tail_min(self, kind: str, burn_in: int = 0) -> Optional[tuple[int, Fraction]]:
        rows = [row for row in getattr(self, kind) if row[0] >= burn_in]
        return min(rows, key=lambda row: row[1]) if rows else None

    def summary(self, burn_in: int = 0) -> dict:
        out = {"h": self.h, "precision": self.precision, "burn_in": burn_in}
        for name, val in (
            ("max_count_ratio", self.max_count_ratio()),
            ("min_element_ratio", self.min_element_ratio()),
            ("tail_min_gap_by_power_estimate", self.tail_min("gap_power", burn_in)),
            ("tail_min_gap_by_index_estimate", self.tail_min("gap_index", burn_in)),
        ):
            out[name] = None if val is None else {"at": val[0], "value": val[1]}
        return out

    def rows(self) -> Iterable[tuple[str, int, Fraction]]:
        for x, count, r in self.samples:
            yield "count", x, Fraction(count)
            yield "count_ratio", x, r
        for k, _, r in self.element_ratios:
            yield "element_ratio", k, r
        for k, r in self.gap_power:
            yield "gap_by_power", k, r
        for k, r in self.gap_index:
            yield "gap_by_index", k, r


def ratio_report(
    A: Sequence[int],
    h: int,
    sample_xs: Optional[Iterable[int]] = None,
    *,
    precision: int = DEFAULT_PRECISION,
) -> GrowthMetrics:
    """Growth metrics of a basis prefix.

    By default the counting function is sampled at every positive element,
    which is where A(x)/x^(1/h) attains its local maxima.
    """
    if not A:
        raise ValueError("empty sequence")
    if h < 2:
        raise ValueError("h must be at least 2")
    if sample_xs is None:
        sample_xs = [a for a in A if a > 0]
    m = GrowthMetrics(h, precision)
    for x in sample_xs:
        if x < 1:
            continue
        c = counting(A, x)
        m.samples.append((x, c, root_ratio(c, x, 1, h, precision)))
    offset = 1 if A[0] == 0 else 0
    for i, a in enumerate(A):
        k = i + 1 - offset  # number of positive elements <= a
        if k >= 1:
            m.element_ratios.append((k, a, Fraction(a, k**h)))
    for k in range(len(A) - 1):
        if A[k] > 0:
            m.gap_power.append((k, gap_statistic(A, h, k, "by_power", precision)))
        if k >= 1:
            m.gap_index.append((k, gap_statistic(A, h, k, "by_index", precision)))
    return m


def gap_statistic(
    A: Sequence[int], h: int, k: int, normalization: str = "by_power", precision: int = DEFAULT_PRECISION
) -> Fraction:
    """(a_{k+1} - a_k) / a_k^((h-1)/h) (by_power) or (a_{k+1} - a_k) / k (by_index)."""
    d = A[k + 1] - A[k]
    if normalization == "by_index":
        if k < 1:
            raise ZeroDivisionError("by_index statistic needs k >= 1")
        return Fraction(d, k)
    if normalization == "by_power":
        if A[k] == 0:
            raise ZeroDivisionError("by_power statistic undefined at a_k = 0")
        return root_ratio(d, A[k], h - 1, h, precision)
    raise ValueError(f"unknown normalization {normalization!r}")


def tail_min_by_index(A: Sequence[int], lo: int, hi: int) -> tuple[int, Fraction]:
    """Exact minimum of (a_{n+1} - a_n)/n over lo <= n <= hi."""
    if lo < 1 or hi > len(A) - 2:
        raise IndexError(f"need 1 <= lo and hi <= {len(A) - 2}")
    return min(((n, Fraction(A[n + 1] - A[n], n)) for n in range(lo, hi + 1)), key=lambda t: t[1])


def stohr_lower_bound(h: int) -> float:
    """(h!)^(1/h) / Gamma(1 + 1/h)."""
    if h < 1:
        raise ValueError("h must be at least 1")
    return math.exp(math.lgamma(h + 1) / h - math.lgamma(1 + 1 / h))


def thin1_check(A: Sequence[int], h: int, n0: int, N: int) -> tuple[bool, Optional[int]]:
    """Check A(n) > (h!(n+1-n0))^(1/h) - h for every n in [n0, N].

    Assumes hA covers [n0, N]; otherwise the answer means nothing. Returns
    (True, None) or (False, first violating n). Only the right end of each
    run on which A(n) is constant needs testing, since the bound increases.
    """
    fact = math.factorial(h)
    if N < n0:
        return True, None
    n = n0
    while n <= N:
        c = counting(A, n)
        nxt = bisect_right(A, n)
        run_end = min(A[nxt] - 1, N) if nxt < len(A) else N
        # violated iff (c + h)^h <= h! (n + 1 - n0)
        if (c + h) ** h <= fact * (run_end + 1 - n0):
            first = -(-((c + h) ** h) // fact) - 1 + n0
            return False, max(first, n)
        n = run_end + 1
    return True, None


def partial_sum_ratio(q: Sequence[int], k: int) -> Fraction:
    """(q_1 + ... + q_k) / q_k, 1-based k."""
    if not 1 <= k <= len(q):
        raise IndexError(f"k={k} outside [1, {len(q)}]")
    return Fraction(sum(q[:k]), q[k - 1])


def cassels_element(res: CasselsResult, n: int) -> int:
    """a_n = Q_k + (n - M_k) q_k where M_k <= n <= M_{k+1}."""
    k = res.block_of_index(n)
    return res.Q[k - 1] + (n - res.M[k - 1]) * res.blocks[k - 1].step


def cassels_count(res: CasselsResult, x: int) -> int:
    """A(x) = M_k + floor((x - Q_k) / q_k) where Q_k <= x <= Q_{k+1}."""
    k = res.block_of_value(x)
    return res.M[k - 1] + (x - res.Q[k - 1]) // res.blocks[k - 1].step


def order_h_spacing_bound(h: int, g: int) -> Fraction:
    """1/2^(3h-1) - 1/(4^(h-1) g^(h-2))."""
    return Fraction(1, 2 ** (3 * h - 1)) - Fraction(1, 4 ** (h - 1) * g ** (h - 2))


def order_h_spacing_violations(res: OrderHResult) -> list[tuple[int, int, int]]:
    """Consecutive a < a' above A(-1), a' in block j, with (a'-a)/a'^((h-1)/h) below the block bound."""
    h = res.h
    owner: dict[int, list[int]] = {}
    for blk, S in zip(res.blocks, res.block_sets):
        for c in S:
            owner.setdefault(c, []).append(blk.j)
    tail = [a for a in res.A if a > res.base_top]
    bad = []
    for a, b in zip(tail, tail[1:]):
        for j in owner.get(b, ()):
            bound = order_h_spacing_bound(h, res.blocks[j].g)
            if bound > 0 and root_ratio_cmp(b - a, b, h - 1, h, bound) < 0:
                bad.append((a, b, j))
    return bad
