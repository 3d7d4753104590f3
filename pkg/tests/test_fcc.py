import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from rndiff.exceptions import IterationBudgetExceeded
from rndiff.fcc import ConvexWeights, compose, fcc_sequence, gram, is_forward, min_norm_from_gram, min_norm_hull
from rndiff.measures import lebesgue
from rndiff.partitions import dyadic_partition
from rndiff.simple_functions import SimpleFunction

leb = lebesgue()


def rademacher(k):
    return SimpleFunction(dyadic_partition(k), tuple((-1) ** j for j in range(2**k)))


class TestGram:
    def test_constant(self):
        assert gram([SimpleFunction.constant(1)], leb) == [[1]]

    def test_rademacher_identity(self):
        assert gram([rademacher(1), rademacher(2)], leb) == [[1, 0], [0, 1]]

    def test_repeated(self):
        f = SimpleFunction(dyadic_partition(1), (2, 1))
        n2 = F(5, 2)
        assert gram([f, f], leb) == [[n2, n2], [n2, n2]]


class TestMinNorm:
    def test_single(self):
        f = SimpleFunction(dyadic_partition(1), (2, 1))
        hp = min_norm_hull([f], leb)
        assert hp.weights.weights == (1,) and hp.norm2 == 2.5

    def test_opposites(self):
        r = rademacher(1)
        hp = min_norm_hull([r, r.map(lambda v: -v)], leb)
        assert hp.weights.weights == (F(1, 2), F(1, 2)) and hp.norm2 == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_orthonormal(self, n):
        hp = min_norm_hull([rademacher(k) for k in range(1, n + 1)], leb)
        assert hp.weights.weights == (F(1, n),) * n
        assert hp.norm2 == pytest.approx(1 / n, abs=1e-12) and hp.gap <= 1e-10

    def test_all_zero(self):
        z = SimpleFunction.constant(0)
        hp = min_norm_hull([z, z, z], leb)
        assert hp.weights.weights == (1, 0, 0) and hp.norm2 == 0

    def test_budget(self):
        G = [[F(1), F(0)], [F(0), F(1)]]
        with pytest.raises(IterationBudgetExceeded):
            min_norm_from_gram(G, max_iter=0)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
def test_min_norm_against_grid_oracle(seed, n):
    rng = random.Random(seed)
    fs = [SimpleFunction(dyadic_partition(2), tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4))) for _ in range(n)]
    G = gram(fs, leb)
    hp = min_norm_from_gram(G)
    w = np.array([float(x) for x in hp.weights.weights])
    assert sum(hp.weights.weights) == 1 and all(x >= 0 for x in hp.weights.weights)
    # the grid only overestimates the true minimum
    assert hp.norm2 <= oracles.brute_force_min_norm([[float(x) for x in r] for r in G]) + 1e-9
    assert hp.norm2 == pytest.approx(float(w @ np.array(G, dtype=float) @ w), abs=1e-12)


class TestFccSequence:
    def test_constant_sequence(self):
        f = SimpleFunction(dyadic_partition(1), (F(1, 3), 2))
        seq = fcc_sequence([f, f, f], leb)
        assert all(g == f for g in seq.functions)
        assert seq.distances == [0.0, 0.0]

    def test_rademacher(self):
        N = 6
        seq = fcc_sequence([rademacher(k) for k in range(1, N + 1)], leb)
        for n, v in enumerate(seq.norms2):
            assert v == pytest.approx(1 / (N - n), abs=1e-12)
        assert is_forward(seq.weights)
        assert all(a <= b + 1e-12 for a, b in zip(seq.norms2, seq.norms2[1:]))
        # the Cauchy gaps shrink as the tail gets longer
        assert all(a < b for a, b in zip(seq.distances, seq.distances[1:]))


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_fcc_of_fcc_is_fcc(N, seed):
    rng = random.Random(seed)

    def forward_weights(length):
        out = []
        for n in range(length):
            idx = tuple(range(n, length))
            raw = [rng.randint(0, 3) for _ in idx]
            if not any(raw):
                raw[0] = 1
            tot = sum(raw)
            out.append(ConvexWeights(idx, tuple(F(r, tot) for r in raw)))
        return out

    inner = forward_weights(N)
    outer = forward_weights(N)
    composed = [compose(o, inner) for o in outer]
    assert is_forward(inner) and is_forward(outer) and is_forward(composed)
    assert all(sum(c.weights) == 1 for c in composed)


def test_weights_validation():
    with pytest.raises(ValueError):
        ConvexWeights((0, 1), (F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        ConvexWeights((1, 0), (F(1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        ConvexWeights((0, 1), (F(3, 2), F(-1, 2)))
