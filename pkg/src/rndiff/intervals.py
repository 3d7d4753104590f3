"""Exact rationals and finite unions of half-open subintervals of [0, 1)."""

from __future__ import annotations

import bisect
import re
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .exceptions import InvalidSet

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected on purpose: every mass in the package is exact, and a
    binary float silently carries representation error into it.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise ValueError(f"not a rational literal: {value!r}")
        return Fraction(value.replace(" ", ""))
    raise TypeError(f"expected int, Fraction or 'p/q' string, got {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    """Inverse of :func:`as_rational` for strings; integers print without ``/1``."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class IntervalSet:
    """A canonical finite union of half-open intervals ``[lo, hi)`` inside [0, 1).

    Pieces are sorted, pairwise disjoint and non-adjacent (touching pieces are
    merged), so two sets are equal iff their piece tuples are equal.  The
    constructor rejects anything that is not already canonical; use
    :meth:`from_pieces` to normalise arbitrary input.
    """

    __slots__ = ("_pieces", "_hash")

    def __init__(self, pieces: Iterable[tuple] = ()):
        pieces = tuple((as_rational(lo), as_rational(hi)) for lo, hi in pieces)
        prev_hi = None
        for lo, hi in pieces:
            if not (ZERO <= lo < hi <= ONE):
                raise InvalidSet(f"piece [{lo}, {hi}) is empty or leaves [0, 1)")
            if prev_hi is not None and lo <= prev_hi:
                raise InvalidSet(f"piece starting at {lo} overlaps or touches its predecessor")
            prev_hi = hi
        self._pieces = pieces
        self._hash = None

    @classmethod
    def _trusted(cls, pieces: tuple) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj._pieces = pieces
        obj._hash = None
        return obj

    @classmethod
    def interval(cls, lo, hi) -> "IntervalSet":
        lo, hi = as_rational(lo), as_rational(hi)
        if lo >= hi:
            return cls._trusted(())
        return cls([(lo, hi)])

    @classmethod
    def unit(cls) -> "IntervalSet":
        return cls._trusted(((ZERO, ONE),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls._trusted(())

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple]) -> "IntervalSet":
        """Normalise any collection of intervals (clipped to [0, 1))."""
        raw = []
        for lo, hi in pieces:
            lo, hi = max(as_rational(lo), ZERO), min(as_rational(hi), ONE)
            if lo < hi:
                raw.append((lo, hi))
        raw.sort()
        merged: list[list[Fraction]] = []
        for lo, hi in raw:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        return cls._trusted(tuple((lo, hi) for lo, hi in merged))

    # -- basic protocol -------------------------------------------------
    @property
    def pieces(self) -> tuple:
        return self._pieces

    def __iter__(self) -> Iterator[tuple]:
        return iter(self._pieces)

    def __len__(self) -> int:
        return len(self._pieces)

    def __bool__(self) -> bool:
        return bool(self._pieces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._pieces == other._pieces

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._pieces)
        return self._hash

    def __repr__(self) -> str:
        body = " ∪ ".join(f"[{format_rational(lo)}, {format_rational(hi)})" for lo, hi in self._pieces)
        return f"IntervalSet({body or '∅'})"

    # -- geometry -------------------------------------------------------
    @property
    def left(self) -> Fraction:
        if not self._pieces:
            raise InvalidSet("empty set has no leftmost point")
        return self._pieces[0][0]

    def length(self) -> Fraction:
        return sum((hi - lo for lo, hi in self._pieces), ZERO)

    def is_contiguous(self) -> bool:
        return len(self._pieces) == 1

    def contains_point(self, x) -> bool:
        x = as_rational(x)
        i = bisect.bisect_right([lo for lo, _ in self._pieces], x) - 1
        return i >= 0 and x < self._pieces[i][1]

    def is_interior_point(self, x) -> bool:
        """True iff ``lo < x < hi`` for some piece."""
        x = as_rational(x)
        return any(lo < x < hi for lo, hi in self._pieces)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        a, b = self._pieces, other._pieces
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        # intersections of canonical sets can only touch where an input touched itself
        return IntervalSet.from_pieces(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_pieces(self._pieces + other._pieces)

    def complement(self) -> "IntervalSet":
        out = []
        cursor = ZERO
        for lo, hi in self._pieces:
            if cursor < lo:
                out.append((cursor, lo))
            cursor = hi
        if cursor < ONE:
            out.append((cursor, ONE))
        return IntervalSet._trusted(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    def issubset(self, other: "IntervalSet") -> bool:
        return self.difference(other).length() == 0 if self._pieces else True

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return not self.intersection(other)

    def split_at(self, x) -> tuple["IntervalSet", "IntervalSet"]:
        """Return ``(self ∩ [0, x), self ∩ [x, 1))``."""
        x = as_rational(x)
        left, right = [], []
        for lo, hi in self._pieces:
            if hi <= x:
                left.append((lo, hi))
            elif lo >= x:
                right.append((lo, hi))
            else:
                left.append((lo, x))
                right.append((x, hi))
        return IntervalSet._trusted(tuple(left)), IntervalSet._trusted(tuple(right))

    def endpoints(self) -> list[Fraction]:
        return [p for piece in self._pieces for p in piece]

    # -- serialisation --------------------------------------------------
    def to_json(self) -> list:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self._pieces]

    @classmethod
    def from_json(cls, data: Sequence) -> "IntervalSet":
        return cls([(as_rational(lo), as_rational(hi)) for lo, hi in data])
