"""Finite partitions of [0, 1) into interval sets, ordered by refinement."""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Iterable, Sequence

from .exceptions import InvalidPartition, PointNotInterior
from .intervals import ONE, ZERO, IntervalSet, as_rational


class Partition:
    """An ordered tuple of disjoint, nonempty interval sets covering [0, 1).

    Cells are kept sorted by their leftmost endpoint, which makes the cell
    order (and everything summed over it) deterministic.
    """

    __slots__ = ("_cells", "_tiling")

    def __init__(self, cells: Iterable[IntervalSet], *, validate: bool = True):
        cells = sorted(cells, key=lambda c: c.left if c else ONE)
        self._cells = tuple(cells)
        self._tiling = None
        if validate:
            self._validate()

    def _validate(self):
        cursor = ZERO
        for lo, hi, _ in self.tiling():
            if lo != cursor:
                kind = "overlap" if lo < cursor else "gap"
                raise InvalidPartition(f"{kind} at {lo}")
            cursor = hi
        if cursor != ONE:
            raise InvalidPartition(f"cells do not reach 1 (stop at {cursor})")
        if any(not c for c in self._cells):
            raise InvalidPartition("empty cell")

    def tiling(self) -> list[tuple[Fraction, Fraction, int]]:
        """All pieces as ``(lo, hi, cell_index)`` sorted by ``lo``."""
        if self._tiling is None:
            self._tiling = sorted((lo, hi, i) for i, c in enumerate(self._cells) for lo, hi in c)
        return self._tiling

    @property
    def cells(self) -> tuple[IntervalSet, ...]:
        return self._cells

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self):
        return iter(self._cells)

    def __getitem__(self, i) -> IntervalSet:
        return self._cells[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._cells == other._cells

    def __hash__(self) -> int:
        return hash(self._cells)

    def __repr__(self) -> str:
        return f"Partition({list(self._cells)!r})"

    def locate(self, x) -> int:
        """Index of the cell containing ``x`` in [0, 1)."""
        x = as_rational(x)
        tiles = self.tiling()
        k = bisect.bisect_right(tiles, (x, ONE + 1, len(self._cells))) - 1
        if k < 0 or not (tiles[k][0] <= x < tiles[k][1]):
            raise ValueError(f"{x} is outside [0, 1)")
        return tiles[k][2]

    def to_json(self) -> list:
        return [c.to_json() for c in self._cells]

    @classmethod
    def from_json(cls, data: Sequence) -> "Partition":
        return cls(IntervalSet.from_json(c) for c in data)


def trivial_partition() -> Partition:
    return Partition((IntervalSet.unit(),), validate=False)


def from_breakpoints(points: Iterable) -> Partition:
    """Contiguous partition cut at the given interior points."""
    pts = sorted({as_rational(p) for p in points} - {ZERO, ONE})
    if pts and not (ZERO < pts[0] and pts[-1] < ONE):
        raise InvalidPartition("breakpoints must lie in (0, 1)")
    edges = [ZERO, *pts, ONE]
    return Partition((IntervalSet._trusted(((a, b),)) for a, b in zip(edges, edges[1:])), validate=False)


def dyadic_partition(level: int) -> Partition:
    n = 2**level
    return from_breakpoints(Fraction(k, n) for k in range(1, n))


def split_cell(pi: Partition, cell_index: int, point) -> Partition:
    """Replace one cell by its parts in ``[0, point)`` and ``[point, 1)``."""
    point = as_rational(point)
    cell = pi[cell_index]
    if not cell.is_interior_point(point):
        raise PointNotInterior(f"{point} is not strictly inside cell {cell_index} = {cell!r}")
    left, right = cell.split_at(point)
    cells = list(pi.cells)
    cells[cell_index : cell_index + 1] = [left, right]
    return Partition(cells, validate=False)


def _overlay(a: Partition, b: Partition):
    """Yield ``(lo, hi, i, j)``: the common tiling of two partitions."""
    ta, tb = a.tiling(), b.tiling()
    ia = ib = 0
    lo = ZERO
    while ia < len(ta) and ib < len(tb):
        hi = min(ta[ia][1], tb[ib][1])
        yield lo, hi, ta[ia][2], tb[ib][2]
        lo = hi
        if ta[ia][1] == hi:
            ia += 1
        if tb[ib][1] == hi:
            ib += 1


def common_refinement(i: Partition, j: Partition) -> Partition:
    """The join ``i ∨ j``: all nonempty intersections ``A ∩ B``."""
    groups: dict[tuple[int, int], list] = {}
    for lo, hi, a, b in _overlay(i, j):
        groups.setdefault((a, b), []).append((lo, hi))
    return Partition((IntervalSet.from_pieces(p) for p in groups.values()), validate=False)


def refinement_map(coarse: Partition, fine: Partition) -> list[int] | None:
    """For each fine cell, the index of the coarse cell containing it.

    Returns ``None`` when ``fine`` does not refine ``coarse``.
    """
    owner: list[int | None] = [None] * len(fine)
    for _, _, a, b in _overlay(coarse, fine):
        if owner[b] is None:
            owner[b] = a
        elif owner[b] != a:
            return None
    return owner  # type: ignore[return-value]


def is_refinement(coarse: Partition, fine: Partition) -> bool:
    """True iff every cell of ``fine`` lies inside a single cell of ``coarse``."""
    return refinement_map(coarse, fine) is not None
