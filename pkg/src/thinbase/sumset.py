"""Exact h-fold sumsets over a bounded window.

Bitmaps are Python ints used as packed bit vectors (bit n set iff n is a
member). A shifted-OR pass costs O(N/64) word operations per arithmetic run
of summands and runs entirely inside CPython's bignum routines.
"""

from __future__ import annotations

import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb
from os import PathLike
from pathlib import Path
from typing import Iterable, Sequence, Union

from .core import Interval

DEFAULT_WINDOW_LIMIT = 2**31
NAIVE_GUARD = 10**7
BITMAP_MAGIC = b"THBMAP01"


class WindowLimitError(ValueError):
    pass


class GuardExceededError(ValueError):
    pass


@dataclass(frozen=True)
class WindowBitmap:
    """Membership table of a set intersected with [0, N]."""

    N: int
    bits: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("window top must be nonnegative")
        if self.bits < 0 or self.bits.bit_length() > self.N + 1:
            raise ValueError("bits outside [0, N]")

    @classmethod
    def from_elements(cls, elements: Iterable[int], N: int) -> "WindowBitmap":
        bits = 0
        for a in elements:
            if 0 <= a <= N:
                bits |= 1 << a
        return cls(N, bits)

    def __contains__(self, n: object) -> bool:
        return isinstance(n, int) and 0 <= n <= self.N and (self.bits >> n) & 1 == 1

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self):
        # walk set bits a byte at a time; fine for the sizes we list
        data = self.bits.to_bytes(_nbytes(self.N), "little")
        for i, byte in enumerate(data):
            while byte:
                low = byte & -byte
                yield 8 * i + low.bit_length() - 1
                byte ^= low

    def members(self) -> list[int]:
        return list(self)

    def to_bytes(self) -> bytes:
        return BITMAP_MAGIC + struct.pack("<Q", self.N) + self.bits.to_bytes(_nbytes(self.N), "little")

    @classmethod
    def from_bytes(cls, data: bytes) -> "WindowBitmap":
        if data[:8] != BITMAP_MAGIC:
            raise ValueError("bad bitmap magic")
        (N,) = struct.unpack("<Q", data[8:16])
        payload = data[16:]
        if len(payload) != _nbytes(N):
            raise ValueError(f"bitmap payload is {len(payload)} bytes, expected {_nbytes(N)}")
        return cls(N, int.from_bytes(payload, "little"))


def _nbytes(N: int) -> int:
    return (N + 8) // 8


def save_bitmap(bm: WindowBitmap, path: Union[str, PathLike]) -> None:
    Path(path).write_bytes(bm.to_bytes())


def load_bitmap(path: Union[str, PathLike]) -> WindowBitmap:
    return WindowBitmap.from_bytes(Path(path).read_bytes())


def _check_window(N: int, limit: int) -> None:
    if N < 0:
        raise ValueError("window top must be nonnegative")
    if N + 1 > limit:
        raise WindowLimitError(f"window of {N + 1} bits exceeds limit {limit}")


def _prefix(A: Sequence[int], N: int) -> Sequence[int]:
    return A[: bisect_right(A, N)]


def arithmetic_runs(summands: Sequence[int]) -> list[tuple[int, int, int]]:
    """Greedy split of a sorted sequence into (start, step, terms) progressions."""
    runs = []
    i, n = 0, len(summands)
    while i < n:
        if i + 1 == n:
            runs.append((summands[i], 1, 1))
            break
        step = summands[i + 1] - summands[i]
        j = i + 1
        while j + 1 < n and summands[j + 1] - summands[j] == step:
            j += 1
        runs.append((summands[i], step, j - i + 1))
        i = j + 1
    return runs


def _shift_or(prev: int, summands: Sequence[int], mask: int) -> int:
    """OR of prev << a over all a in summands, truncated to mask.

    Each arithmetic run is folded in by doubling, so an interval of length m
    costs O(log m) shifts instead of m.
    """
    acc = 0
    for start, step, terms in arithmetic_runs(summands):
        run = (prev << start) & mask
        done = 1
        while done < terms:
            more = min(done, terms - done)
            run |= (run << (more * step)) & mask
            done += more
        acc |= run
    return acc


def hfold_window(A: Sequence[int], h: int, N: int, *, limit: int = DEFAULT_WINDOW_LIMIT) -> WindowBitmap:
    """hA ∩ [0, N] with exactly h summands, by h-1 shifted-OR passes."""
    if h < 1:
        raise ValueError("h must be at least 1")
    _check_window(N, limit)
    mask = (1 << (N + 1)) - 1
    summands = _prefix(A, N)
    base = WindowBitmap.from_elements(summands, N).bits
    bits = base
    for _ in range(h - 1):
        if not bits:
            break
        bits = _shift_or(bits, summands, mask)
    return WindowBitmap(N, bits)


def pair_sumset_window(
    A: Sequence[int], B: Sequence[int], N: int, *, limit: int = DEFAULT_WINDOW_LIMIT
) -> WindowBitmap:
    _check_window(N, limit)
    mask = (1 << (N + 1)) - 1
    a_part = _prefix(A, N)
    b_part = _prefix(B, N)
    # shift the larger operand by the smaller one's elements
    if len(a_part) < len(b_part):
        a_part, b_part = b_part, a_part
    base = WindowBitmap.from_elements(a_part, N).bits
    return WindowBitmap(N, _shift_or(base, b_part, mask))


def naive_hfold(A: Sequence[int], h: int, N: int, *, guard: int = NAIVE_GUARD) -> WindowBitmap:
    """Brute-force oracle for hfold_window: enumerate every multiset of size h."""
    if h < 1:
        raise ValueError("h must be at least 1")
    if comb(len(A) + h - 1, h) > guard:
        raise GuardExceededError(f"C({len(A)}+{h}-1, {h}) multisets exceeds guard {guard}")
    members = set()
    for combo in combinations_with_replacement(A, h):
        s = sum(combo)
        if s <= N:
            members.add(s)
    return WindowBitmap.from_elements(members, N)


def representation_count(A: Sequence[int], h: int, n: int, *, guard: int = NAIVE_GUARD) -> int:
    """Number of multisets {a'_1, ..., a'_h} drawn from A with sum n."""
    if h < 1:
        raise ValueError("h must be at least 1")
    if comb(len(A) + h - 1, h) > guard:
        raise GuardExceededError(f"C({len(A)}+{h}-1, {h}) multisets exceeds guard {guard}")
    return sum(1 for combo in combinations_with_replacement(A, h) if sum(combo) == n)


@dataclass(frozen=True)
class CoverageReport:
    target: Interval
    gaps: list[tuple[int, int]] = field(default_factory=list)
    gap_count: int = 0
    missing: int = 0

    @property
    def covered(self) -> bool:
        return self.gap_count == 0

    @property
    def truncated(self) -> bool:
        return self.gap_count > len(self.gaps)

    def to_dict(self) -> dict:
        return {
            "target": [self.target.lo, self.target.top],
            "covered": self.covered,
            "gaps": [list(g) for g in self.gaps],
            "gap_count": self.gap_count,
            "missing_count": self.missing,
            "gaps_truncated": self.truncated,
        }


def coverage_report(bm: WindowBitmap, target: Interval, *, max_gaps: int = 100) -> CoverageReport:
    """Maximal runs of [target] missing from bm, in increasing order."""
    lo, top = target.lo, target.top
    if top > bm.N:
        raise ValueError(f"target {target} lies outside window [0,{bm.N}]")
    width = top - lo + 1
    if width <= 0:
        return CoverageReport(target)
    window_mask = (1 << width) - 1
    holes = ~(bm.bits >> lo) & window_mask
    if not holes:
        return CoverageReport(target)
    missing = bin(holes).count("1")
    run_starts = holes & ~(holes << 1)
    gap_count = bin(run_starts).count("1")
    gaps = []
    while holes and len(gaps) < max_gaps:
        start = (holes & -holes).bit_length() - 1
        rest = holes >> start
        run = ((rest + 1) & ~rest).bit_length() - 1
        gaps.append((lo + start, lo + start + run - 1))
        holes &= ~(((1 << run) - 1) << start)
    return CoverageReport(target, gaps, gap_count, missing)
