import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracles
from gen import interval_sets, measures, rand_density, seeds
from rndiff.exceptions import InvalidMeasure, InvalidSet, NonTriadicEndpoint, SpecError
from rndiff.intervals import IntervalSet
from rndiff.measures import (
    Atoms,
    Cantor,
    Density,
    MassResult,
    Scale,
    Sum,
    candidate_points,
    cantor_function,
    dirac,
    lebesgue,
    mass,
    piecewise_constant,
    total_mass,
)
from rndiff.spec_io import dumps_measure, loads_measure, measure_to_json, parse_measure

I = IntervalSet.interval


class TestMassExamples:
    def test_lebesgue_interval(self):
        r = mass(lebesgue(), I(F(1, 4), F(3, 4)))
        assert r == MassResult(F(1, 2), True, F(0))

    def test_cantor_first_third(self):
        r = mass(Cantor(1), I(0, F(1, 3)), exact=True)
        assert r.value == oracles.cantor_cdf_triadic(1, 1) == F(1, 2)
        assert r.exact

    def test_atom_in_half_open_cell(self):
        assert mass(dirac(F(1, 3)), I(F(1, 3), F(1, 2))).value == 1
        assert mass(dirac(F(1, 3)), I(0, F(1, 3))).value == 0

    def test_total_mass(self):
        assert total_mass(dirac(F(1, 3))) == 1
        assert total_mass(lebesgue()) == 1
        assert total_mass(Sum((Cantor(F(1, 2)), lebesgue(F(1, 2))))) == 1

    def test_noncanonical_input(self):
        with pytest.raises(InvalidSet):
            mass(lebesgue(), [(0, F(1, 2)), (F(1, 2), 1)])

    def test_exact_mode_rejects_unresolvable_cantor(self):
        # a point of the Cantor set whose ternary digits (0s and 2s) repeat
        # with period 101, beyond the digit budget for this tolerance
        rng = random.Random(7)
        block = sum(rng.choice((0, 2)) * 3**i for i in range(101))
        s = I(0, F(block, 3**101 - 1))
        r = mass(Cantor(1), s)
        assert not r.exact and 0 < r.error_bound <= F(1, 10**15)
        with pytest.raises(NonTriadicEndpoint):
            mass(Cantor(1), s, exact=True)

    def test_cantor_periodic_points_are_exact(self):
        # 1/4 = 0.020202..._3 sits in the Cantor set with C(1/4) = 1/3
        assert cantor_function(F(1, 4)) == (F(1, 3), 0)
        assert cantor_function(F(3, 4)) == (F(2, 3), 0)

    def test_degenerate_components_are_zero(self):
        z = Sum((Atoms(((F(1, 2), 0),)), Density((0, 1), ((0,),)), Cantor(0)))
        assert mass(z, IntervalSet.unit()).value == 0


@pytest.mark.parametrize("k", range(0, 21))
def test_cantor_self_similarity(k):
    r = mass(Cantor(1), I(0, F(1, 3**k)), exact=True)
    assert r.value == F(1, 2**k)


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 3**n))))
def test_cantor_matches_digit_oracle(nk):
    n, k = nk
    assert cantor_function(F(k, 3**n))[0] == oracles.cantor_cdf_triadic(k, n)


@given(seeds)
def test_density_against_riemann_oracle(seed):
    rng = random.Random(seed)
    d = rand_density(rng)
    a, b = sorted(F(rng.randrange(0, 97), 97) for _ in range(2))
    if a == b:
        b = F(1)
    exact = mass(d, I(a, b)).value
    approx = oracles.riemann_mass(d.breakpoints, d.coeffs, float(a), float(b))
    assert abs(float(exact) - approx) <= 1e-9


@given(measures(), interval_sets(), interval_sets())
def test_additive_monotone_nonnegative(m, s1, s2):
    a = s1.difference(s2)
    r_a, r_b, r_u = mass(m, a), mass(m, s2), mass(m, a.union(s2))
    assert r_a.value >= 0 and r_b.value >= 0
    if r_a.exact and r_b.exact and r_u.exact:
        assert r_u.value == r_a.value + r_b.value
        assert mass(m, a.intersection(s1)).value <= r_u.value


@given(measures())
def test_total_equals_unit_mass(m):
    r = mass(m, IntervalSet.unit())
    assert r.value == total_mass(m) and r.exact


class TestValidation:
    def test_negative_weights(self):
        with pytest.raises(InvalidMeasure):
            dirac(F(1, 2), -1)
        with pytest.raises(InvalidMeasure):
            Cantor(-1)
        with pytest.raises(InvalidMeasure):
            Scale(-1, lebesgue())

    def test_duplicate_atoms(self):
        with pytest.raises(InvalidMeasure):
            Atoms(((F(1, 2), 1), (F(1, 2), 2)))

    def test_negative_polynomials(self):
        with pytest.raises(InvalidMeasure):
            Density((0, 1), ((1, -2),))  # 1 - 2x < 0 near 1
        with pytest.raises(InvalidMeasure):
            # (x - 1/2)^2 - 1/100 dips below zero inside the piece
            Density((0, 1), ((F(1, 4) - F(1, 100), -1, 1),))
        Density((0, 1), ((F(1, 4), -1, 1),))  # (x - 1/2)^2 touches zero only

    def test_breakpoints(self):
        with pytest.raises(InvalidMeasure):
            piecewise_constant([0, F(1, 2)], [1])
        with pytest.raises(InvalidMeasure):
            piecewise_constant([0, F(1, 2), F(1, 2), 1], [1, 1, 1])


class TestCandidates:
    def test_atom_and_dyadics(self):
        assert candidate_points(dirac(F(1, 3)), IntervalSet.unit(), 1) == [F(1, 3), F(1, 2)]

    def test_depth_zero(self):
        assert candidate_points(lebesgue(), I(0, F(1, 2)), 0) == []

    def test_cantor_adds_triadics(self):
        assert candidate_points(Cantor(1), IntervalSet.unit(), 1) == [F(1, 3), F(1, 2), F(2, 3)]

    def test_window_limits_levels(self):
        pts = candidate_points(lebesgue(), I(0, F(1, 1024)), 40, window=2)
        assert pts == [F(1, 4096), F(1, 2048), F(3, 4096)]


class TestSpecs:
    def test_grammar_roundtrip(self):
        doc = {"sum": [{"atoms": [["1/3", 1]]}, {"density": {"breakpoints": [0, "1/2", 1], "coeffs": [["3/2"], ["1/2"]]}},
                       {"cantor": "1/2"}, {"scale": [2, {"cantor": 1}]}]}
        m = parse_measure(doc)
        assert total_mass(m) == F(1) + 1 + F(1, 2) + 2
        assert loads_measure(dumps_measure(m)) == m
        assert parse_measure(json.loads(json.dumps(measure_to_json(m)))) == m

    @pytest.mark.parametrize(
        "doc,path",
        [
            ({"atoms": [["1/3", 0.5]]}, "$.atoms[0][1]"),
            ({"sum": [{"cantor": 1}, {"atoms": [["1/3", -1]]}]}, "$.sum[1].atoms[0][1]"),
            ({"scale": [1, {"bogus": 1}]}, "$.scale[1]"),
            ({"density": {"breakpoints": [0, 1], "coeffs": [[1, -2]]}}, "$.density"),
        ],
    )
    def test_errors_name_path(self, doc, path):
        with pytest.raises(SpecError) as exc:
            parse_measure(doc)
        assert exc.value.path == path

    def test_bad_json(self):
        with pytest.raises(SpecError):
            loads_measure("{")
