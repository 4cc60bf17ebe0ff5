"""Shared value types, sequence algebra and the sequence file format."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from os import PathLike
from pathlib import Path
from typing import Iterable, Union

Natural = int


class SequenceFormatError(ValueError):
    """Raised when a sequence file cannot be parsed or is not strictly increasing."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MonotoneSequence(tuple):
    """Strictly increasing tuple of nonnegative Python ints.

    Elements are never truncated to machine words. Construction validates
    ordering, so any instance can be trusted downstream.
    """

    __slots__ = ()

    def __new__(cls, elements: Iterable[int] = ()):
        items = tuple(elements)
        prev = -1
        for i, x in enumerate(items):
            if not isinstance(x, int) or isinstance(x, bool):
                raise TypeError(f"element {i} is not an int: {x!r}")
            if x <= prev:
                if x < 0:
                    raise ValueError(f"element {i} is negative: {x}")
                raise ValueError(f"not strictly increasing at index {i}: {prev} >= {x}")
            prev = x
        return super().__new__(cls, items)

    @classmethod
    def from_unsorted(cls, elements: Iterable[int]) -> "MonotoneSequence":
        return cls(sorted(set(elements)))

    def __repr__(self) -> str:
        if len(self) > 12:
            head = ", ".join(map(str, self[:10]))
            return f"MonotoneSequence([{head}, ... ({len(self)} elements)])"
        return f"MonotoneSequence({list(self)!r})"


@dataclass(frozen=True)
class Progression:
    """start, start+step, ..., start+count*step (count+1 terms)."""

    start: int
    step: int
    count: int

    def __post_init__(self):
        if self.start < 0:
            raise ValueError("start must be nonnegative")
        if self.step < 1:
            raise ValueError("step must be positive")
        if self.count < 0:
            raise ValueError("count must be nonnegative")

    @property
    def last(self) -> int:
        return self.start + self.count * self.step


@dataclass(frozen=True)
class Interval:
    """Integer interval [lo, hi] or [lo, hi)."""

    lo: int
    hi: int
    hi_inclusive: bool = True

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("lo must be nonnegative")
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @property
    def top(self) -> int:
        """Largest member; lo - 1 when the half-open interval is empty."""
        return self.hi if self.hi_inclusive else self.hi - 1

    def __len__(self) -> int:
        return self.top - self.lo + 1

    def __contains__(self, n: object) -> bool:
        return isinstance(n, int) and self.lo <= n <= self.top

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``lo:hi`` (inclusive)."""
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"expected lo:hi, got {text!r}")
        return cls(int(lo), int(hi))

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}{']' if self.hi_inclusive else ')'}"


def expand_progression(p: Progression) -> MonotoneSequence:
    return MonotoneSequence(range(p.start, p.last + 1, p.step))


def union_sorted(sequences: Iterable[Iterable[int]]) -> MonotoneSequence:
    out: list[int] = []
    for x in heapq.merge(*sequences):
        if not out or x != out[-1]:
            out.append(x)
    return MonotoneSequence(out)


PathType = Union[str, PathLike]


def parse_sequence(text: str) -> MonotoneSequence:
    values: list[int] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            x = int(line, 10)
        except ValueError:
            raise SequenceFormatError(f"not a decimal integer: {raw!r}", lineno) from None
        if x < 0:
            raise SequenceFormatError(f"negative value {x}", lineno)
        if values and x <= values[-1]:
            raise SequenceFormatError(
                f"monotonicity violation at index {len(values)}: {values[-1]} >= {x}", lineno
            )
        values.append(x)
    return MonotoneSequence(values)


def read_sequence(path: PathType) -> MonotoneSequence:
    return parse_sequence(Path(path).read_text(encoding="ascii"))


def format_sequence(seq: Iterable[int]) -> str:
    return "".join(f"{x}\n" for x in seq)


def write_sequence(seq: Iterable[int], path: PathType) -> None:
    Path(path).write_bytes(format_sequence(seq).encode("ascii"))
