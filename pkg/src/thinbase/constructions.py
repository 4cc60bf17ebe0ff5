"""Finite prefixes of thin bases of finite order.

Every generator checks the hypotheses of the construction it implements and
returns a :class:`MonotoneSequence`; bounds are closed (elements equal to the
bound are kept).
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .core import Interval, MonotoneSequence, Progression, expand_progression, union_sorted


class HypothesisError(ValueError):
    """The inputs violate a hypothesis of the construction."""

    def __init__(self, message: str, violations: Sequence["Violation"] = ()):
        self.violations = list(violations)
        if self.violations:
            message += ": " + "; ".join(map(str, self.violations))
        super().__init__(message)


class CoverageError(ValueError):
    """A digit position needed below the bound lies in no part of the partition."""


@dataclass(frozen=True)
class Violation:
    condition: str
    index: int
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.condition} at i={self.index}" + (f" ({self.detail})" if self.detail else "")


# g-adic components


@dataclass(frozen=True)
class GAdicSpec:
    g: int
    exponents: tuple[int, ...]
    bound: int

    def __post_init__(self):
        if self.g < 2:
            raise ValueError("radix g must be at least 2")
        object.__setattr__(self, "exponents", tuple(MonotoneSequence(self.exponents)))
        if not self.exponents:
            raise ValueError("exponent set must be nonempty")
        if self.bound < 0:
            raise ValueError("bound must be nonnegative")


def residue_exponents(h: int, i: int, top: int) -> tuple[int, ...]:
    """Exponents in [0, top] congruent to i mod h."""
    return tuple(range(i, top + 1, h))


def max_exponent(g: int, bound: int) -> int:
    """Largest t with g**t <= bound, or -1 when bound < 1."""
    if bound < 1:
        return -1
    t, p = 0, g
    while p <= bound:
        t += 1
        p *= g
    return t


def g_adic_component(spec: GAdicSpec) -> MonotoneSequence:
    """All a <= bound of the form sum e_w g**w over finite F ⊆ W, 0 <= e_w < g."""
    g, bound = spec.g, spec.bound
    sums = [0]
    # largest exponent first so partial sums prune early
    for w in sorted((w for w in spec.exponents if g**w <= bound), reverse=True):
        gw = g**w
        sums = [s + e * gw for s in sums for e in range(g) if s + e * gw <= bound]
    return MonotoneSequence(sorted(sums))


def raikov_stohr(h: int, bound: int) -> MonotoneSequence:
    """Union of the binary components with exponents in each residue class mod h."""
    if h < 2:
        raise ValueError("h must be at least 2")
    top = max_exponent(2, bound)
    parts = []
    for i in range(h):
        exps = residue_exponents(h, i, top)
        if exps:
            parts.append(g_adic_component(GAdicSpec(2, exps, bound)))
    return union_sorted(parts) if parts else MonotoneSequence([0])


@dataclass(frozen=True)
class PartitionSpec:
    g: int
    h: int
    parts: tuple[tuple[int, ...], ...]
    bound: int

    def __post_init__(self):
        if self.g < 2:
            raise ValueError("radix g must be at least 2")
        if self.h < 2:
            raise ValueError("h must be at least 2")
        if len(self.parts) != self.h:
            raise ValueError(f"expected {self.h} parts, got {len(self.parts)}")
        object.__setattr__(
            self, "parts", tuple(tuple(MonotoneSequence.from_unsorted(p)) for p in self.parts)
        )

    @classmethod
    def residues(cls, g: int, h: int, bound: int) -> "PartitionSpec":
        top = max_exponent(g, bound)
        return cls(g, h, tuple(residue_exponents(h, i, max(top, 0)) for i in range(h)), bound)

    def uncovered(self) -> list[int]:
        covered = set().union(*self.parts)
        return [w for w in range(max_exponent(self.g, self.bound) + 1) if w not in covered]

    def density(self, i: int, x: int) -> Fraction:
        """Finite-prefix surrogate |W_i ∩ [0, x]| / x for the part's asymptotic density."""
        if x < 1:
            raise ValueError("x must be positive")
        return Fraction(bisect_right(self.parts[i], x), x)


def jia_nathanson(spec: PartitionSpec) -> MonotoneSequence:
    missing = spec.uncovered()
    if missing:
        raise CoverageError(f"exponents {missing} lie in no part")
    comps = [
        g_adic_component(GAdicSpec(spec.g, part, spec.bound)) for part in spec.parts if part
    ]
    return union_sorted(comps)


def digit_split(n: int, g: int, parts: Sequence[Sequence[int]]) -> list[int]:
    """Split n's base-g digits into one addend per part.

    Each digit position goes to the first part containing it.
    """
    owner: dict[int, int] = {}
    for i, part in enumerate(parts):
        for w in part:
            owner.setdefault(w, i)
    addends = [0] * len(parts)
    w, gw = 0, 1
    while n:
        n, e = divmod(n, g)
        if e:
            if w not in owner:
                raise CoverageError(f"exponent {w} lies in no part")
            addends[owner[w]] += e * gw
        w += 1
        gw *= g
    return addends


# Cassels order 2


def fibonacci_q(count: int) -> list[int]:
    if count < 2:
        raise ValueError("count must be at least 2")
    q = [1, 1]
    while len(q) < count:
        q.append(q[-1] + q[-2])
    return q


def _at(seq: Sequence[int], i: int) -> int:
    """1-based access."""
    return seq[i - 1]


def validate_cassels(q: Sequence[int], m: Sequence[int], K: int) -> list[Violation]:
    """Check AP1-AP4 for 2 <= i <= K+1."""
    if K < 1:
        raise ValueError("K must be at least 1")
    top = K + 1
    if len(q) < top + 1 or len(m) < top + 1:
        raise ValueError(f"q and m need at least {top + 1} terms to check i <= {top}")
    if any(x < 1 for x in q) or any(x < 1 for x in m):
        raise ValueError("q and m must be positive")
    out: list[Violation] = []
    if _at(q, 1) != 1:
        out.append(Violation("AP1", 1, f"q_1 = {_at(q, 1)}"))
    for i in range(2, top + 1):
        a, b = gcd(_at(q, i - 1), _at(q, i)), gcd(_at(q, i - 1), _at(q, i + 1))
        if a != 1 or b != 1:
            out.append(Violation("AP2", i, f"gcd(q_{i-1},q_{i})={a}, gcd(q_{i-1},q_{i+1})={b}"))
        need = _at(q, i) + _at(q, i + 1) - 2
        if _at(m, i - 1) < need:
            out.append(Violation("AP3", i, f"m_{i-1}={_at(m, i - 1)} < {need}"))
        lhs = _at(m, i + 1) * _at(q, i + 1)
        rhs = _at(m, i) * _at(q, i) + _at(m, i - 1) * _at(q, i - 1)
        if lhs < rhs:
            out.append(Violation("AP4", i, f"{lhs} < {rhs}"))
    return out


@dataclass(frozen=True)
class CasselsSpec2:
    q: tuple[int, ...]
    m: tuple[int, ...]
    K: int

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "m", tuple(self.m))
        if self.K < 1:
            raise ValueError("block count K must be at least 1")
        if len(self.q) < self.K or len(self.m) < self.K:
            raise ValueError(f"need at least K={self.K} terms of q and m")


@dataclass(frozen=True)
class CasselsResult:
    """Q[k-1] = Q_k for k = 1..K+1; blocks[k-1] = A_k; M[k-1] = M_k."""

    spec: CasselsSpec2
    Q: list[int]
    M: list[int]
    blocks: list[Progression]
    A: MonotoneSequence

    def __iter__(self):
        # allow (Q, blocks, A) unpacking
        return iter((self.Q, self.blocks, self.A))

    def block_of_index(self, n: int) -> int:
        """Smallest k with M_k <= n <= M_{k+1}."""
        if not 0 <= n <= self.M[-1]:
            raise IndexError(f"index {n} outside [0, {self.M[-1]}]")
        return max(bisect_left(self.M, n), 1)

    def block_of_value(self, x: int) -> int:
        """Smallest k with Q_k <= x <= Q_{k+1}."""
        if not 0 <= x <= self.Q[-1]:
            raise IndexError(f"value {x} outside [0, {self.Q[-1]}]")
        return max(bisect_left(self.Q, x), 1)

    def table(self) -> list[dict]:
        return [
            {"k": k, "Q_k": self.Q[k - 1], "M_k": self.M[k - 1], "q_k": b.step, "m_k": b.count}
            for k, b in enumerate(self.blocks, start=1)
        ] + [{"k": len(self.blocks) + 1, "Q_k": self.Q[-1], "M_k": self.M[-1]}]


def cassels_progressions(spec: CasselsSpec2, *, validate: bool = True) -> CasselsResult:
    """Blocks A_k = Q_k + q_k * [0, m_k] for k = 1..K and their union."""
    if validate:
        # check as much of 2 <= i <= K+1 as the supplied lists reach
        reach = min(spec.K, len(spec.q) - 2, len(spec.m) - 2)
        if reach >= 1:
            violations = validate_cassels(spec.q, spec.m, reach)
        else:
            violations = [] if spec.q[0] == 1 else [Violation("AP1", 1, f"q_1 = {spec.q[0]}")]
        if violations:
            raise HypothesisError("Cassels progression hypotheses fail", violations)
    Q, M, blocks = [0], [0], []
    for k in range(1, spec.K + 1):
        qk, mk = _at(spec.q, k), _at(spec.m, k)
        blocks.append(Progression(Q[-1], qk, mk))
        Q.append(Q[-1] + mk * qk)
        M.append(M[-1] + mk)
    A = union_sorted(expand_progression(b) for b in blocks)
    return CasselsResult(spec, Q, M, blocks, A)


def order2_m(q: Sequence[int], count: int) -> list[int]:
    """m_i = q_{i+1} + q_{i+2}."""
    return [_at(q, i + 1) + _at(q, i + 2) for i in range(1, count + 1)]


def validate_order2(q: Sequence[int], K: int) -> list[Violation]:
    """q_1 = 1, C2-a (coprimality) and C2-b for 2 <= i <= K+1, as far as q reaches."""
    out: list[Violation] = []
    if _at(q, 1) != 1:
        out.append(Violation("q_1 = 1", 1, f"q_1 = {_at(q, 1)}"))
    for i in range(2, K + 2):
        if i + 1 <= len(q):
            a, b = gcd(_at(q, i - 1), _at(q, i)), gcd(_at(q, i - 1), _at(q, i + 1))
            if a != 1 or b != 1:
                out.append(Violation("C2-a", i, f"gcd(q_{i-1},q_{i})={a}, gcd(q_{i-1},q_{i+1})={b}"))
        if i + 3 <= len(q):
            lhs = _at(q, i + 1) * (_at(q, i + 2) + _at(q, i + 3))
            rhs = _at(q, i) * (_at(q, i + 1) + _at(q, i + 2)) + _at(q, i - 1) * (_at(q, i) + _at(q, i + 1))
            if lhs < rhs:
                out.append(Violation("C2-b", i, f"{lhs} < {rhs}"))
    return out


def cassels_order2(q: Sequence[int], K: int) -> CasselsResult:
    """Order-2 Cassels basis with m_i = q_{i+1} + q_{i+2}; q needs K+2 terms."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if len(q) < K + 2:
        raise ValueError(f"q needs at least K+2 = {K + 2} terms")
    violations = validate_order2(q, K)
    if violations:
        raise HypothesisError("order-2 Cassels hypotheses fail", violations)
    m = order2_m(q, K)
    # AP1-AP4 follow from C2-a/C2-b with this m, so skip the generic check
    return cassels_progressions(CasselsSpec2(tuple(q[:K]), tuple(m), K), validate=False)


def fibonacci_cassels(K: int) -> CasselsResult:
    return cassels_order2(fibonacci_q(K + 4), K)


def fibonacci_cassels_covering(bound: int) -> CasselsResult:
    """Fibonacci-Cassels prefix with the least K such that Q_{K+1} > bound."""
    K = 1
    while True:
        res = fibonacci_cassels(K)
        if res.Q[-1] > bound:
            return res
        K += 1


# Cassels order h >= 3


@dataclass(frozen=True)
class BlockSpec:
    h: int
    v: int
    L: int

    def __post_init__(self):
        if self.h < 3:
            raise ValueError("h must be at least 3")
        if self.v < 1:
            raise ValueError("v must be positive")
        if self.L < self.h:
            raise ValueError("L must be at least h")

    @property
    def g(self) -> int:
        return 2 ** (self.h + 1) * self.v

    def coverage_interval(self) -> Interval:
        """Interval [((h^2+3h-2)/2) g^h, (h(h+1)/2 + L) g^h) contained in hC."""
        h, gh = self.h, self.g**self.h
        return Interval((h * h + 3 * h - 2) * gh // 2, (h * (h + 1) // 2 + self.L) * gh, False)


def block_families(spec: BlockSpec) -> dict[str, list[int]]:
    h, v, L, g = spec.h, spec.v, spec.L, spec.g
    gh, gh1, gh2 = g**h, g ** (h - 1), g ** (h - 2)
    return {
        "first": [gh + e * gh1 + 2 * v * gh2 + e for e in range(g)],
        "middle": [(i + 1) * gh + e * gh1 + e * g**i for i in range(h - 2) for e in range(g)],
        "perturbed": [
            (h - 1) * gh + (4 * v * q + r) * gh1 + (4 * v * q + r) * gh2
            for q in range(2 ** (h - 1))
            for r in range(2 * v)
        ],
        "top": [h * gh + ell * gh1 for ell in range(L * g)],
    }


def cassels_block(spec: BlockSpec) -> MonotoneSequence:
    """The finite set C(v, L): four families of perturbed g-adic integers."""
    return MonotoneSequence.from_unsorted(x for fam in block_families(spec).values() for x in fam)


def block_clause_violations(spec: BlockSpec, C: Sequence[int] | None = None) -> list[str]:
    """Scan C(v, L) for failures of the range, spacing and residue-distance clauses."""
    if C is None:
        C = cassels_block(spec)
    h, v, L, g = spec.h, spec.v, spec.L, spec.g
    gh, gh1, gh2 = g**h, g ** (h - 1), g ** (h - 2)
    sep = v * gh2 - g
    period = 4 * v * gh2
    out = []
    for c in C:
        if not gh <= c < (h + L) * gh:
            out.append(f"(ii) range: {c}")
        if c >= h * gh and c % gh1:
            out.append(f"(ii) residue: {c}")
        off = (c + v * gh2) % period
        if min(off, period - off) < sep:
            out.append(f"(iv) distance: {c}")
    for a, b in zip(C, C[1:]):
        if b - a < sep:
            out.append(f"(iii) spacing: {a},{b}")
    return out


@dataclass(frozen=True)
class OrderHBlock:
    j: int
    v: int
    g: int
    p: int
    interval: Interval

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "v_j": self.v,
            "g_j": self.g,
            "p_j": self.p,
            "I_j": [self.interval.lo, self.interval.hi],
            "I_j_hi_inclusive": self.interval.hi_inclusive,
        }


@dataclass(frozen=True)
class OrderHResult:
    h: int
    L: int
    base_top: int
    base_interval: Interval
    blocks: list[OrderHBlock]
    block_sets: list[MonotoneSequence] = field(repr=False)
    A: MonotoneSequence = field(repr=False)

    def meta(self) -> dict:
        return {
            "h": self.h,
            "L": self.L,
            "A_minus_1": [0, self.base_top],
            "I_minus_1": [self.base_interval.lo, self.base_interval.hi],
            "blocks": [b.to_dict() for b in self.blocks],
        }


def order_h_L(h: int) -> int:
    return 2 ** (2 * h) - h - 1


def order_h_p(h: int, j: int) -> int:
    """p_j = sum_{i<=j} v_i g_i^{h-2} with v_i = 2^i, g_i = 2^{i+h+1}."""
    return sum(2**i * 2 ** ((i + h + 1) * (h - 2)) for i in range(j + 1))


def cassels_order_h(h: int, j_max: int, *, include_base: bool = True) -> OrderHResult:
    """A = [0, 2^(h^2+2h)] ∪ ⋃_{j<=j_max} (p_j + C(2^j, L)).

    Raises AssertionError if consecutive coverage intervals fail to overlap,
    which would mean a parameter transcription bug.
    """
    if h < 3:
        raise ValueError("h must be at least 3")
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    L = order_h_L(h)
    base_top = 2 ** (h * h + 2 * h)
    base_interval = Interval(0, h * base_top)
    blocks, sets = [], []
    p = 0
    for j in range(j_max + 1):
        v, g = 2**j, 2 ** (j + h + 1)
        p += v * g ** (h - 2)
        spec = BlockSpec(h, v, L)
        cov = spec.coverage_interval()
        blocks.append(OrderHBlock(j, v, g, p, Interval(h * p + cov.lo, h * p + cov.hi, False)))
        sets.append(MonotoneSequence(p + c for c in cassels_block(spec)))
    if blocks[0].interval.lo > base_interval.hi:
        raise AssertionError("I(-1) and I(0) do not overlap")
    for a, b in zip(blocks, blocks[1:]):
        if b.interval.lo >= a.interval.hi:
            raise AssertionError(f"I({a.j}) and I({b.j}) do not overlap")
    parts = list(sets)
    if include_base:
        parts.insert(0, range(base_top + 1))
    A = union_sorted(parts)
    return OrderHResult(h, L, base_top, base_interval, blocks, sets, A)


# polynomial embedding


@dataclass(frozen=True)
class EmbedSpec:
    h: int
    gamma: Fraction
    source: MonotoneSequence
    burn_in: int = 1

    def __post_init__(self):
        if self.h < 2:
            raise ValueError("h must be at least 2")
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        object.__setattr__(self, "source", MonotoneSequence(self.source))
        if len(self.source) < 2:
            raise ValueError("source needs at least two elements")


@dataclass(frozen=True)
class EmbedResult:
    C: MonotoneSequence
    grid: MonotoneSequence  # grid[k-1] = b_k
    K: int
    L: int


def _round_half_up(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def embedding_grid(h: int, gamma: Fraction, top: int) -> list[int]:
    """b_1, b_2, ... until b_k >= top: rounded (γk/h)^h repaired to strict increase."""
    base = Fraction(gamma) / h
    grid: list[int] = []
    k = 1
    while not grid or grid[-1] < top:
        b = _round_half_up((base * k) ** h)
        if grid and b <= grid[-1]:
            b = grid[-1] + 1
        grid.append(b)
        k += 1
    return grid


def embedding_gap_violations(source: Sequence[int], h: int, gamma: Fraction, burn_in: int = 1) -> list[int]:
    """1-based k >= burn_in with (a_{k+1}-a_k)/a_k^((h-1)/h) < γ (a_k = 0 skipped)."""
    bad = []
    gh = Fraction(gamma) ** h
    for k in range(max(burn_in, 1), len(source)):
        a, nxt = source[k - 1], source[k]
        if a > 0 and (nxt - a) ** h < gh * a ** (h - 1):
            bad.append(k)
    return bad


def embed_polynomial(spec: EmbedSpec) -> EmbedResult:
    """Supersequence C of the source with c_k = (γk/h)^h + O(k^{h-1}).

    K is the smallest grid index from which every grid interval (b_k, b_{k+1}]
    holds at most one source element, as scanned over the supplied prefix only.
    """
    h, gamma, src = spec.h, spec.gamma, spec.source
    bad = embedding_gap_violations(src, h, gamma, spec.burn_in)
    if bad:
        raise HypothesisError(
            f"gap statistic falls below gamma={gamma} after burn-in {spec.burn_in}",
            [Violation("gap statistic < gamma", k) for k in bad[:10]],
        )
    grid = embedding_grid(h, gamma, src[-1])
    # interval index k >= 1 holding each source element above b_1
    hits = Counter(bisect_left(grid, a) for a in src if a > grid[0])
    crowded = [k for k, n in hits.items() if n >= 2]
    K = max(crowded) + 1 if crowded else 1
    bK = grid[K - 1]
    L = bisect_right(src, bK)
    C = list(src[:L])
    i = 1
    while K + i - 1 < len(grid):
        lo, hi = grid[K + i - 2], grid[K + i - 1]
        j = bisect_right(src, lo)
        C.append(src[j] if j < len(src) and src[j] <= hi else hi)
        i += 1
    return EmbedResult(MonotoneSequence(C), MonotoneSequence(grid), K, L)
