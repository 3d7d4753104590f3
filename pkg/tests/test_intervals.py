from fractions import Fraction as F

import pytest
from hypothesis import given

from gen import interval_sets, small_rationals
from rndiff.exceptions import InvalidSet
from rndiff.intervals import IntervalSet, as_rational, format_rational


def S(*pieces):
    return IntervalSet.from_pieces(pieces)


class TestRationals:
    @pytest.mark.parametrize("text,value", [("1/3", F(1, 3)), ("2/4", F(1, 2)), (" 7 ", F(7)), (3, F(3)), (F(5, 6), F(5, 6))])
    def test_accepts(self, text, value):
        assert as_rational(text) == value

    @pytest.mark.parametrize("bad", [0.5, True, "0.5", "1/0x", None, "1e-3"])
    def test_rejects(self, bad):
        with pytest.raises((TypeError, ValueError)):
            as_rational(bad)

    def test_reduced_form(self):
        q = as_rational("6/4")
        assert (q.numerator, q.denominator) == (3, 2)

    @given(small_rationals)
    def test_format_roundtrip(self, q):
        assert as_rational(format_rational(q)) == q


class TestCanonicalForm:
    def test_constructor_rejects_adjacent(self):
        with pytest.raises(InvalidSet):
            IntervalSet([(0, F(1, 2)), (F(1, 2), 1)])

    def test_constructor_rejects_unsorted_or_empty(self):
        with pytest.raises(InvalidSet):
            IntervalSet([(F(1, 2), 1), (0, F(1, 4))])
        with pytest.raises(InvalidSet):
            IntervalSet([(F(1, 2), F(1, 2))])
        with pytest.raises(InvalidSet):
            IntervalSet([(0, 2)])

    def test_from_pieces_merges(self):
        assert S((F(1, 2), 1), (0, F(1, 2))) == IntervalSet.unit()
        assert S((0, F(1, 3)), (F(1, 4), F(1, 2))) == S((0, F(1, 2)))

    def test_json_roundtrip(self):
        s = S((0, F(1, 3)), (F(1, 2), F(2, 3)))
        assert IntervalSet.from_json(s.to_json()) == s
        assert s.to_json() == [["0", "1/3"], ["1/2", "2/3"]]


class TestPoints:
    def test_half_open(self):
        s = S((F(1, 3), F(1, 2)))
        assert s.contains_point(F(1, 3))
        assert not s.contains_point(F(1, 2))
        assert not s.is_interior_point(F(1, 3))
        assert s.is_interior_point(F(2, 5))

    def test_split_sends_point_right(self):
        left, right = IntervalSet.unit().split_at(F(1, 3))
        assert not left.contains_point(F(1, 3)) and right.contains_point(F(1, 3))


@given(interval_sets(), interval_sets())
def test_boolean_algebra(a, b):
    u = IntervalSet.unit()
    assert a.union(b) == b.union(a)
    assert a.intersection(b) == b.intersection(a)
    assert a.union(a.complement()) == u
    assert a.intersection(a.complement()) == IntervalSet.empty()
    assert a.difference(b) == a.intersection(b.complement())
    assert a.intersection(b).issubset(a)
    assert a.union(b).length() == a.length() + b.length() - a.intersection(b).length()


@given(interval_sets(), interval_sets(), interval_sets())
def test_distributive(a, b, c):
    assert a.intersection(b.union(c)) == a.intersection(b).union(a.intersection(c))


@given(interval_sets(), small_rationals)
def test_split_partitions_set(a, x):
    left, right = a.split_at(x)
    assert left.isdisjoint(right)
    assert left.union(right) == a
    assert all(hi <= x for _, hi in left) and all(lo >= x for lo, _ in right)
