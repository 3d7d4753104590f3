from fractions import Fraction as F

import pytest
from hypothesis import given

import oracles
from gen import partitions, small_rationals
from rndiff.exceptions import InvalidPartition, PointNotInterior
from rndiff.intervals import IntervalSet
from rndiff.partitions import (
    Partition,
    common_refinement,
    dyadic_partition,
    from_breakpoints,
    is_refinement,
    refinement_map,
    split_cell,
    trivial_partition,
)

half = from_breakpoints([F(1, 2)])
third = from_breakpoints([F(1, 3)])


def test_trivial():
    t = trivial_partition()
    assert t.cells == (IntervalSet.unit(),)
    assert len(t) == 1


class TestSplit:
    def test_examples(self):
        assert split_cell(trivial_partition(), 0, F(1, 2)) == half
        assert split_cell(half, 1, F(2, 3)) == from_breakpoints([F(1, 2), F(2, 3)])

    @pytest.mark.parametrize("x", [F(0), F(1), F(1, 2)])
    def test_boundary_points(self, x):
        with pytest.raises(PointNotInterior):
            split_cell(half, 0, x)

    @given(partitions(), small_rationals)
    def test_split_refines_by_one(self, pi, x):
        k = pi.locate(x)
        if not pi[k].is_interior_point(x):
            return
        fine = split_cell(pi, k, x)
        assert len(fine) == len(pi) + 1 and is_refinement(pi, fine)


class TestJoin:
    def test_example(self):
        assert common_refinement(half, third) == from_breakpoints([F(1, 3), F(1, 2)])

    def test_not_refinement(self):
        assert not is_refinement(half, third)
        assert is_refinement(trivial_partition(), third)

    def test_noncontiguous_cells(self):
        odd_even = Partition([IntervalSet.from_pieces([(0, F(1, 4)), (F(1, 2), F(3, 4))]),
                              IntervalSet.from_pieces([(F(1, 4), F(1, 2)), (F(3, 4), 1)])])
        j = common_refinement(odd_even, half)
        assert j == dyadic_partition(2)
        assert refinement_map(odd_even, j) == [0, 1, 0, 1]


@given(partitions(), partitions(), partitions())
def test_lattice_laws_against_block_oracle(a, b, c):
    grid = oracles.grid_of(a, b, c)
    A, B, C = (oracles.blocks(oracles.labels(p, grid)) for p in (a, b, c))
    ab = common_refinement(a, b)
    AB = oracles.blocks(oracles.labels(ab, grid))
    assert AB == oracles.join_blocks(A, B)
    assert common_refinement(b, a) == ab
    assert common_refinement(a, a) == a
    assert common_refinement(a, trivial_partition()) == a
    assert common_refinement(common_refinement(a, b), c) == common_refinement(a, common_refinement(b, c))
    assert is_refinement(a, ab) and is_refinement(b, ab)
    # order agrees with the oracle, and the join is the least upper bound
    assert is_refinement(a, b) == oracles.blocks_refine(A, B)
    if is_refinement(a, c) and is_refinement(b, c):
        assert is_refinement(ab, c)


@given(partitions(), partitions())
def test_refinement_is_partial_order(a, b):
    assert is_refinement(a, a)
    if is_refinement(a, b) and is_refinement(b, a):
        assert a == b


@given(partitions())
def test_cover_exact(pi):
    assert sum((c.length() for c in pi.cells), F(0)) == 1


class TestValidation:
    def test_gap_and_overlap(self):
        with pytest.raises(InvalidPartition):
            Partition([IntervalSet.interval(0, F(1, 2))])
        with pytest.raises(InvalidPartition):
            Partition([IntervalSet.interval(0, F(2, 3)), IntervalSet.interval(F(1, 2), 1)])

    def test_json_roundtrip(self):
        pi = dyadic_partition(3)
        assert Partition.from_json(pi.to_json()) == pi

    def test_locate(self):
        assert dyadic_partition(2).locate(F(1, 2)) == 2
