"""Simple functions over partitions and the functionals built on them.

Everything here is exact rational arithmetic except :func:`exp_functional`
(and :func:`convexity_gap`, which returns a rigorous interval enclosure).
Functions living on different partitions are compared on the overlay of the
two tilings, which is the common refinement without materialising it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exceptions import BaseDominationViolated, NotARefinement
from .intervals import ZERO, IntervalSet, as_rational, format_rational
from .measures import DEFAULT_CANTOR_TOLERANCE, Measure, _cantor_digits, mass
from .partitions import Partition, _overlay, common_refinement, refinement_map, trivial_partition


@dataclass(frozen=True)
class SimpleFunction:
    """Values attached to the cells of a partition.

    Functions built from measures (``f_pi``, conditional expectations of
    them) are nonnegative; signed values are allowed so that test families
    such as Rademacher functions can share the same machinery.
    """

    partition: Partition
    values: tuple

    def __post_init__(self):
        vals = tuple(as_rational(v) for v in self.values)
        if len(vals) != len(self.partition):
            raise ValueError(f"{len(vals)} values for {len(self.partition)} cells")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, c, partition: Partition | None = None) -> "SimpleFunction":
        partition = partition or trivial_partition()
        return cls(partition, (as_rational(c),) * len(partition))

    def __len__(self):
        return len(self.values)

    def items(self):
        return zip(self.partition.cells, self.values)

    def value_at(self, x) -> Fraction:
        return self.values[self.partition.locate(x)]

    def map(self, fn) -> "SimpleFunction":
        return SimpleFunction(self.partition, tuple(fn(v) for v in self.values))

    def refine_to(self, fine: Partition) -> "SimpleFunction":
        owner = refinement_map(self.partition, fine)
        if owner is None:
            raise NotARefinement("target partition does not refine the function's partition")
        return SimpleFunction(fine, tuple(self.values[i] for i in owner))

    def to_json(self) -> list:
        return [[cell.to_json(), format_rational(v)] for cell, v in self.items()]

    @classmethod
    def from_json(cls, data) -> "SimpleFunction":
        cells = [IntervalSet.from_json(c) for c, _ in data]
        values = [as_rational(v) for _, v in data]
        order = sorted(range(len(cells)), key=lambda k: cells[k].left)
        return cls(Partition([cells[k] for k in order]), tuple(values[k] for k in order))


def cell_masses(m: Measure, pi: Partition, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> list[Fraction]:
    return [mass(m, cell, cantor_tolerance=cantor_tolerance).value for cell in pi.cells]


def _ratio_values(num: Sequence[Fraction], den: Sequence[Fraction]) -> tuple:
    return tuple(n / d if d > 0 else ZERO for n, d in zip(num, den))


def f_pi(nu: Measure, base: Measure, pi: Partition, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> SimpleFunction:
    """Cell-wise ratio ``nu(A) / base(A)``, and 0 on base-null cells."""
    return SimpleFunction(
        pi,
        _ratio_values(cell_masses(nu, pi, cantor_tolerance), cell_masses(base, pi, cantor_tolerance)),
    )


def integrate(phi: SimpleFunction, m: Measure, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> Fraction:
    return sum((v * w for v, w in zip(phi.values, cell_masses(m, phi.partition, cantor_tolerance))), ZERO)


def integrate_over(phi: SimpleFunction, m: Measure, A: IntervalSet, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> Fraction:
    """``∫_A phi dm`` for an arbitrary interval set ``A``."""
    total = ZERO
    for cell, v in phi.items():
        if v:
            total += v * mass(m, cell.intersection(A), cantor_tolerance=cantor_tolerance).value
    return total


def exp_functional(nu: Measure, gamma: Measure, pi: Partition, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> float:
    """``Σ_A gamma(A) exp(-nu(A)/gamma(A))`` over cells of positive gamma-mass.

    Masses are exact; only the exponentials are floating point, summed with
    :func:`math.fsum` in cell order.
    """
    terms = []
    for k, (n, g) in enumerate(zip(cell_masses(nu, pi, cantor_tolerance), cell_masses(gamma, pi, cantor_tolerance))):
        if n > g:
            raise BaseDominationViolated(f"cell {k}: nu = {n} exceeds base = {g}")
        terms.append(exp_term(n, g))
    return math.fsum(terms)


def exp_term(n: Fraction, g: Fraction) -> float:
    return float(g) * math.exp(-float(n / g)) if g > 0 else 0.0


def conditional_expectation(
    f: SimpleFunction, coarse: Partition, m: Measure, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE
) -> SimpleFunction:
    """Cell-wise ``m``-average of ``f`` over the cells of ``coarse``.

    The denominator is the sum of the fine-cell masses, so ``∫_B f dm =
    ∫_B E[f] dm`` holds exactly on every coarse cell ``B`` even where a
    Cantor mass is only known to within its tolerance.
    """
    owner = refinement_map(coarse, f.partition)
    if owner is None:
        raise NotARefinement("f's partition does not refine the coarse partition")
    weights = cell_masses(m, f.partition, cantor_tolerance)
    num = [ZERO] * len(coarse)
    den = [ZERO] * len(coarse)
    for k, (v, w) in enumerate(zip(f.values, weights)):
        num[owner[k]] += v * w
        den[owner[k]] += w
    return SimpleFunction(coarse, _ratio_values(num, den))


def _segments(f: SimpleFunction, g: SimpleFunction, m: Measure, cantor_tolerance):
    segs = list(_overlay(f.partition, g.partition))
    digits = _cantor_digits(m, len(segs), as_rational(cantor_tolerance))
    for lo, hi, i, j in segs:
        w = m.cdf(hi, digits)[0] - m.cdf(lo, digits)[0]
        yield f.values[i], g.values[j], w


def l2_inner(f: SimpleFunction, g: SimpleFunction, m: Measure, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> Fraction:
    return sum((a * b * w for a, b, w in _segments(f, g, m, cantor_tolerance)), ZERO)


def l1_distance(f: SimpleFunction, g: SimpleFunction, m: Measure, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> Fraction:
    return sum((abs(a - b) * w for a, b, w in _segments(f, g, m, cantor_tolerance)), ZERO)


def ae_equal(f: SimpleFunction, g: SimpleFunction, m: Measure) -> bool:
    """Equality on every overlay cell of positive ``m``-mass."""
    return all(a == b for a, b, w in _segments(f, g, m, DEFAULT_CANTOR_TOLERANCE) if w > 0)


def linear_combination(fs: Sequence[SimpleFunction], weights: Sequence) -> SimpleFunction:
    """``Σ w_k f_k`` on the common refinement of the inputs."""
    fs = list(fs)
    part = fs[0].partition
    for f in fs[1:]:
        if f.partition != part:
            part = common_refinement(part, f.partition)
    total = [ZERO] * len(part)
    for f, w in zip(fs, weights):
        w = as_rational(w)
        if w == 0:
            continue
        for k, v in enumerate(f.refine_to(part).values):
            total[k] += w * v
    return SimpleFunction(part, tuple(total))


def level_set(f: SimpleFunction, k) -> IntervalSet:
    """The set ``{f >= k}`` as an interval set."""
    k = as_rational(k)
    return IntervalSet.from_pieces(p for cell, v in f.items() if v >= k for p in cell)


def tail_integral(f: SimpleFunction, m: Measure, k, *, cantor_tolerance=DEFAULT_CANTOR_TOLERANCE) -> Fraction:
    """``∫_{f >= k} f dm``."""
    k = as_rational(k)
    masses = cell_masses(m, f.partition, cantor_tolerance)
    return sum((v * w for v, w in zip(f.values, masses) if v >= k), ZERO)


def convexity_gap(fine: SimpleFunction, coarse: SimpleFunction, m: Measure, *, prec: int = 256):
    """Interval enclosure of ``Σ_A m(A)[φ(t) - φ(s) - φ'(s)(t - s)]`` with ``φ = exp(-·)``.

    ``t`` is the fine value and ``s`` the coarse value on each overlay cell.
    By convexity of ``φ`` each bracket is nonnegative, so the lower end of
    the returned :mod:`mpmath` interval should be >= 0.
    """
    from mpmath import iv

    old = iv.prec
    iv.prec = prec
    try:
        total = iv.mpf(0)
        for t, s, w in _segments(fine, coarse, m, DEFAULT_CANTOR_TOLERANCE):
            if w == 0 or t == s:
                continue
            ti = iv.mpf(t.numerator) / t.denominator
            si = iv.mpf(s.numerator) / s.denominator
            wi = iv.mpf(w.numerator) / w.denominator
            total += wi * (iv.exp(-ti) - iv.exp(-si) + iv.exp(-si) * (ti - si))
        return total
    finally:
        iv.prec = old
