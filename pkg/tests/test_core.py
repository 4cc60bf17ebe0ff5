import pytest
from hypothesis import given, strategies as st

from thinbase.core import (
    Interval,
    MonotoneSequence,
    Progression,
    SequenceFormatError,
    expand_progression,
    parse_sequence,
    read_sequence,
    union_sorted,
    write_sequence,
)

sorted_sets = st.sets(st.integers(0, 10**30), max_size=30).map(sorted)


@pytest.mark.parametrize(
    "p, expected",
    [
        (Progression(3, 1, 5), [3, 4, 5, 6, 7, 8]),
        (Progression(8, 2, 8), list(range(8, 25, 2))),
        (Progression(0, 7, 0), [0]),
    ],
)
def test_expand_progression(p, expected):
    assert list(expand_progression(p)) == expected


@given(st.integers(0, 10**40), st.integers(1, 10**20), st.integers(0, 50))
def test_progression_shape(start, step, count):
    seq = expand_progression(Progression(start, step, count))
    assert len(seq) == count + 1
    assert all(b - a == step for a, b in zip(seq, seq[1:]))


def test_progression_rejects_zero_step():
    with pytest.raises(ValueError):
        Progression(0, 0, 3)


@pytest.mark.parametrize(
    "parts, expected",
    [
        ([[0, 1, 4, 5], [0, 2, 8, 10]], [0, 1, 2, 4, 5, 8, 10]),
        ([[], []], []),
        ([[5], [5], [5]], [5]),
    ],
)
def test_union_sorted(parts, expected):
    assert list(union_sorted(parts)) == expected


@given(sorted_sets, sorted_sets, sorted_sets)
def test_union_associative_commutative(a, b, c):
    assert union_sorted([union_sorted([a, b]), c]) == union_sorted([a, union_sorted([b, c])])
    assert union_sorted([a, b]) == union_sorted([b, a])
    assert list(union_sorted([a, b, c])) == sorted(set(a) | set(b) | set(c))


def test_monotone_sequence_validation():
    assert MonotoneSequence([]) == ()
    with pytest.raises(ValueError):
        MonotoneSequence([1, 1])
    with pytest.raises(ValueError):
        MonotoneSequence([-1, 2])
    with pytest.raises(TypeError):
        MonotoneSequence([1.5])
    big = 2**200
    assert MonotoneSequence([0, big])[1] == big


def test_parse_examples():
    assert parse_sequence("0\n1\n4\n") == (0, 1, 4)
    assert parse_sequence("# comment\n2\n") == (2,)


def test_parse_duplicate_reports_line():
    with pytest.raises(SequenceFormatError) as err:
        parse_sequence("3\n3\n")
    assert err.value.line == 2
    assert "index 1" in str(err.value)


def test_parse_garbage_reports_line():
    with pytest.raises(SequenceFormatError) as err:
        parse_sequence("1\n2\nx\n")
    assert err.value.line == 3


@given(sorted_sets)
def test_file_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("seq") / "a.txt"
    write_sequence(values, path)
    raw = path.read_bytes()
    assert raw == "".join(f"{v}\n" for v in values).encode("ascii")
    assert list(read_sequence(path)) == values


def test_read_without_trailing_newline(tmp_path):
    path = tmp_path / "s.txt"
    path.write_bytes(b"1\n2")
    assert read_sequence(path) == (1, 2)


def test_interval():
    iv = Interval.parse("5:9")
    assert (iv.lo, iv.hi, len(iv)) == (5, 9, 5)
    half = Interval(5, 9, False)
    assert half.top == 8 and 9 not in half and 8 in half
    with pytest.raises(ValueError):
        Interval(3, 2)
