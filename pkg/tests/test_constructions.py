from fractions import Fraction
from itertools import product
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from thinbase.constructions import (
    BlockSpec,
    CasselsSpec2,
    CoverageError,
    EmbedSpec,
    GAdicSpec,
    HypothesisError,
    PartitionSpec,
    block_clause_violations,
    block_families,
    cassels_block,
    cassels_order2,
    cassels_order_h,
    cassels_progressions,
    digit_split,
    embed_polynomial,
    embedding_grid,
    fibonacci_cassels,
    fibonacci_cassels_covering,
    fibonacci_q,
    g_adic_component,
    jia_nathanson,
    order2_m,
    order_h_L,
    order_h_p,
    raikov_stohr,
    validate_cassels,
    validate_order2,
)
from thinbase.sumset import coverage_report, hfold_window


def brute_g_adic(g, exponents, bound):
    """Every digit assignment over the exponents, filtered by bound."""
    exps = [w for w in exponents if g**w <= bound]
    vals = {sum(e * g**w for e, w in zip(digits, exps)) for digits in product(range(g), repeat=len(exps))}
    return sorted(v for v in vals if v <= bound)


def rs_member(n, h):
    """n is a sum of distinct powers of 2 whose exponents share one residue mod h."""
    bits = [w for w in range(n.bit_length()) if n >> w & 1]
    return len({w % h for w in bits}) <= 1


@pytest.mark.parametrize(
    "g, exps, bound, expected",
    [
        (2, (0, 2, 4), 21, [0, 1, 4, 5, 16, 17, 20, 21]),
        (2, (1, 3), 21, [0, 2, 8, 10]),
        (3, (0,), 5, [0, 1, 2]),
        (10, (0, 1), 99, list(range(100))),
    ],
)
def test_g_adic_examples(g, exps, bound, expected):
    assert list(g_adic_component(GAdicSpec(g, exps, bound))) == expected


@given(
    st.integers(2, 5),
    st.sets(st.integers(0, 6), min_size=1, max_size=5),
    st.integers(0, 5000),
)
def test_g_adic_matches_brute(g, exps, bound):
    assert list(g_adic_component(GAdicSpec(g, tuple(exps), bound))) == brute_g_adic(g, exps, bound)


@pytest.mark.parametrize(
    "h, bound, expected",
    [
        (2, 0, [0]),
        (2, 21, [0, 1, 2, 4, 5, 8, 10, 16, 17, 20, 21]),
        (3, 10, [0, 1, 2, 4, 8, 9]),
    ],
)
def test_raikov_stohr_examples(h, bound, expected):
    assert list(raikov_stohr(h, bound)) == expected


@pytest.mark.parametrize("h", [2, 3, 4])
def test_raikov_stohr_membership(h):
    bound = 5000
    assert list(raikov_stohr(h, bound)) == [n for n in range(bound + 1) if rs_member(n, h)]


@pytest.mark.parametrize("h, bound", [(2, 4096), (3, 4096), (4, 2000)])
def test_raikov_stohr_is_basis(h, bound):
    A = raikov_stohr(h, bound)
    assert coverage_report(hfold_window(A, h, bound), _iv(0, bound)).covered


def _iv(lo, hi):
    from thinbase.core import Interval

    return Interval(lo, hi)


def test_jia_nathanson_special_case_is_raikov_stohr():
    assert jia_nathanson(PartitionSpec.residues(2, 2, 21)) == raikov_stohr(2, 21)


def test_jia_nathanson_coverage_error():
    with pytest.raises(CoverageError):
        jia_nathanson(PartitionSpec(2, 2, ((0, 2), (0, 2)), 4))


def test_jia_nathanson_ternary():
    spec = PartitionSpec(3, 2, ((0, 2, 4, 6), (1, 3, 5)), 3**6)
    A = jia_nathanson(spec)
    assert A[0] == 0 and A[1] == 1
    members = set(A)
    for n in range(3**6 + 1):
        parts = digit_split(n, 3, spec.parts)
        assert sum(parts) == n and all(p in members for p in parts)


def test_jia_nathanson_overlapping_parts():
    spec = PartitionSpec(2, 3, ((0, 1, 2), (2, 3, 4, 5), (5, 6, 7, 8, 9)), 1000)
    A = jia_nathanson(spec)
    assert coverage_report(hfold_window(A, 3, 1000), _iv(0, 1000)).covered


def test_digit_split_exhaustive():
    parts = PartitionSpec.residues(3, 2, 10**4).parts
    for n in range(10**4 + 1):
        a, b = digit_split(n, 3, parts)
        assert a + b == n
        assert all(w % 2 == 0 for w in range(10) if (a // 3**w) % 3)
        assert all(w % 2 == 1 for w in range(10) if (b // 3**w) % 3)


def test_partition_density():
    spec = PartitionSpec.residues(2, 2, 2**10)
    assert spec.density(0, 10) == Fraction(6, 10)
    assert spec.uncovered() == []


def test_fibonacci_q():
    assert fibonacci_q(8) == [1, 1, 2, 3, 5, 8, 13, 21]
    with pytest.raises(ValueError):
        fibonacci_q(1)


def test_validate_cassels_fibonacci_clean():
    q = fibonacci_q(20)
    assert validate_cassels(q, order2_m(q, 16), 10) == []


def test_validate_cassels_gcd_violation():
    q = [2**i for i in range(8)]
    m = [100] * 8
    found = validate_cassels(q, m, 3)
    assert [(v.condition, v.index) for v in found if v.condition == "AP2"][0] == ("AP2", 3)


def test_validate_cassels_ap3():
    found = validate_cassels([1, 2, 3], [1, 1, 1], 1)
    assert [(v.condition, v.index) for v in found] == [("AP3", 2)]


def test_cassels_progressions_fibonacci():
    q = fibonacci_q(8)
    res = cassels_progressions(CasselsSpec2(tuple(q[:4]), tuple(order2_m(q, 4)), 4))
    Q, blocks, A = res
    assert Q == [0, 3, 8, 24, 63]
    expected = list(range(0, 9)) + list(range(10, 25, 2)) + list(range(27, 64, 3))
    assert list(A) == expected
    assert res == cassels_order2(fibonacci_q(6), 4)


def test_cassels_single_block():
    assert list(cassels_progressions(CasselsSpec2((1,), (1,), 1)).A) == [0, 1]


def test_cassels_count_k3():
    res = fibonacci_cassels(3)
    assert len(res.A) == res.M[-1] + 1 == 17


@pytest.mark.parametrize("K", [1, 3, 6, 10])
def test_cassels_invariants(K):
    res = fibonacci_cassels(K)
    assert res.Q[0] == 0
    for k, b in enumerate(res.blocks, start=1):
        assert res.Q[k] - res.Q[k - 1] == b.count * b.step
        assert b.start == res.Q[k - 1]
    for b1, b2 in zip(res.blocks, res.blocks[1:]):
        shared = set(range(b1.start, b1.last + 1, b1.step)) & set(range(b2.start, b2.last + 1, b2.step))
        assert shared == {b1.last}
    top = res.Q[-1]
    assert coverage_report(hfold_window(res.A, 2, top), _iv(0, top)).covered


def test_cassels_order2_rejects_bad_q():
    with pytest.raises(HypothesisError) as err:
        cassels_order2([1, 2, 4, 8, 16, 32], 3)
    assert any(v.condition == "C2-a" for v in err.value.violations)
    with pytest.raises(HypothesisError):
        cassels_order2([2, 3, 5, 8, 13], 2)


def test_validate_order2_constant():
    assert any(v.condition == "C2-b" for v in validate_order2([1] * 10, 5))


def test_fibonacci_covering_choice():
    res = fibonacci_cassels_covering(10**6)
    assert res.Q[-1] > 10**6
    assert fibonacci_cassels(len(res.blocks) - 1).Q[-1] <= 10**6


def test_block_families_and_range():
    spec = BlockSpec(3, 1, 3)
    C = cassels_block(spec)
    assert spec.g == 16
    assert len(C) == sum(len(f) for f in block_families(spec).values()) == 88
    assert (C[0], C[-1]) == (4096, 24320)
    assert 4128 in C
    assert block_clause_violations(spec, C) == []


@pytest.mark.parametrize("v", [1, 2])
def test_block_covers_its_interval(v):
    spec = BlockSpec(3, v, 3)
    C = cassels_block(spec)
    cov = spec.coverage_interval()
    assert coverage_report(hfold_window(C, 3, cov.top), _iv(cov.lo, cov.top)).covered


def test_block_spec_rejects():
    with pytest.raises(ValueError):
        BlockSpec(2, 1, 3)
    with pytest.raises(ValueError):
        BlockSpec(3, 0, 3)


def test_order_h_parameters():
    assert order_h_L(3) == 60
    assert [order_h_p(3, j) for j in range(3)] == [16, 80, 336]
    for h in (3, 4, 5):
        for j in range(6):
            assert order_h_p(h, j) < (2 ** (j + h + 1)) ** h


def test_order_h_tables():
    res = cassels_order_h(3, 2)
    assert res.base_interval.hi == 98304
    assert [(b.interval.lo, b.interval.hi) for b in res.blocks] == [
        (32816, 270384),
        (262384, 2162928),
        (2098160, 17302512),
    ]
    assert res.meta()["blocks"][1]["p_j"] == 80
    assert len(cassels_order_h(3, 1, include_base=False).A) < len(res.A)


def test_embedding_grid_increasing():
    grid = embedding_grid(2, Fraction(1, 8), 10**5)
    assert all(a < b for a, b in zip(grid, grid[1:]))
    assert grid[-1] >= 10**5
    assert grid[1599] == round((1600 / 16) ** 2)


def test_embedding_supersequence():
    src = fibonacci_cassels(10).A
    res = embed_polynomial(EmbedSpec(2, Fraction(1, 8), src))
    assert set(src) <= set(res.C)
    assert len(res.C) > len(src)
    bK = res.grid[res.K - 1]
    assert [c for c in res.C if c <= bK] == [a for a in src if a <= bK]


def test_embedding_on_grid_source():
    grid = embedding_grid(2, Fraction(1, 8), 10**5)
    res = embed_polynomial(EmbedSpec(2, Fraction(1, 8), grid[::4]))
    assert res.K == 1
    assert list(res.C) == grid[: len(res.C)]
    assert res.C[-1] == grid[::4][-1]


def test_embedding_rejects_large_gamma():
    with pytest.raises(HypothesisError) as err:
        embed_polynomial(EmbedSpec(2, Fraction(10), fibonacci_cassels(6).A))
    assert err.value.violations[0].condition == "gap statistic < gamma"


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=2, max_size=40), st.integers(2, 3))
def test_embedding_contains_source(gaps, h):
    src, x = [], 0
    for d in gaps:
        x += d * d * 40
        src.append(x)
    try:
        res = embed_polynomial(EmbedSpec(h, Fraction(1, 64), src))
    except HypothesisError:
        return
    assert set(src) <= set(res.C)
    assert all(a < b for a, b in zip(res.C, res.C[1:]))


def test_gcd_helper_sanity():
    q = fibonacci_q(30)
    assert all(gcd(a, b) == 1 for a, b in zip(q, q[2:]))
