"""Finite positive Borel measures on [0, 1) with exact rational masses.

Every measure is a small immutable tree built from four leaf/branch kinds:

* :class:`Atoms` -- finitely many point masses,
* :class:`Density` -- piecewise-polynomial density against Lebesgue measure,
* :class:`Cantor` -- a multiple of the middle-thirds Cantor measure,
* :class:`Sum` and :class:`Scale` -- nonnegative combinations of the above.

Masses of half-open interval sets are computed from each node's cumulative
distribution ``F(x) = m([0, x))``, so an atom at ``x`` belongs to the cell
``[x, b)``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .exceptions import InvalidMeasure, InvalidSet, NonTriadicEndpoint
from .intervals import ONE, ZERO, IntervalSet, as_rational

#: Default bound on the absolute error of a Cantor mass that cannot be
#: resolved exactly.
DEFAULT_CANTOR_TOLERANCE = Fraction(1, 10**15)

_MIN_CANTOR_DIGITS = 64


@dataclass(frozen=True)
class MassResult:
    value: Fraction
    exact: bool
    error_bound: Fraction = ZERO

    def __post_init__(self):
        if self.error_bound < 0:
            raise ValueError("error_bound must be nonnegative")
        if self.exact != (self.error_bound == 0):
            raise ValueError("exact iff error_bound == 0")


class Measure:
    """Common interface of measure nodes.

    Subclasses implement ``_cdf(x, digits) -> (value, error)`` and the
    structural queries used by the candidate generator.
    """

    # populated per instance in __post_init__ of the dataclass subclasses
    _cache: dict

    def cdf(self, x: Fraction, digits: int = _MIN_CANTOR_DIGITS) -> tuple[Fraction, Fraction]:
        """``m([0, x))`` together with an absolute error bound."""
        key = (x, digits)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cdf(x, digits)
            self._cache[key] = hit
        return hit

    def _cdf(self, x, digits):  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def total(self) -> Fraction:
        raise NotImplementedError

    def atom_locations(self) -> frozenset:
        return frozenset()

    def interior_breakpoints(self) -> frozenset:
        return frozenset()

    def has_cantor(self) -> bool:
        return False

    def cantor_weight(self) -> Fraction:
        """Total (scaled) weight carried by Cantor leaves."""
        return ZERO

    def __add__(self, other: "Measure") -> "Sum":
        return Sum((self, other))

    def __rmul__(self, factor) -> "Scale":
        return Scale(as_rational(factor), self)


MeasureSpec = Measure


def _init_cache(obj):
    object.__setattr__(obj, "_cache", {})


@dataclass(frozen=True)
class Atoms(Measure):
    """Point masses ``[(location, weight), ...]`` with distinct locations in [0, 1)."""

    points: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = []
        for loc, wt in self.points:
            loc, wt = as_rational(loc), as_rational(wt)
            if not (ZERO <= loc < ONE):
                raise InvalidMeasure(f"atom location {loc} outside [0, 1)")
            if wt < 0:
                raise InvalidMeasure(f"atom weight {wt} is negative")
            pts.append((loc, wt))
        pts.sort()
        locs = [p[0] for p in pts]
        if len(set(locs)) != len(locs):
            raise InvalidMeasure("atom locations must be distinct")
        object.__setattr__(self, "points", tuple(pts))
        _init_cache(self)
        prefix = [ZERO]
        for _, wt in pts:
            prefix.append(prefix[-1] + wt)
        object.__setattr__(self, "_locs", locs)
        object.__setattr__(self, "_prefix", prefix)

    def _cdf(self, x, digits):
        return self._prefix[bisect.bisect_left(self._locs, x)], ZERO

    @property
    def total(self):
        return self._prefix[-1]

    def atom_locations(self):
        return frozenset(self._locs)


def _poly_eval(coeffs, x):
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_antiderivative(coeffs):
    return (ZERO,) + tuple(c / (k + 1) for k, c in enumerate(coeffs))


def _nonnegative_on(coeffs: tuple, a: Fraction, b: Fraction) -> bool:
    """Exact check that a rational polynomial is >= 0 on [a, b]."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return True
    if len(coeffs) <= 2:
        # constant or linear: extremes at the endpoints
        return _poly_eval(coeffs, a) >= 0 and _poly_eval(coeffs, b) >= 0
    if _poly_eval(coeffs, a) < 0 or _poly_eval(coeffs, b) < 0:
        return False
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x)
    lead, factors = poly.sqf_list()
    odd = sympy.Poly(lead, x)
    for f, mult in factors:
        if mult % 2:
            odd = odd * f
    if odd.degree() <= 0:
        return lead > 0
    sa = sympy.Rational(a.numerator, a.denominator)
    sb = sympy.Rational(b.numerator, b.denominator)
    closed = odd.count_roots(sa, sb)
    at_ends = int(odd.eval(sa) == 0) + int(odd.eval(sb) == 0)
    if closed - at_ends > 0:
        return False
    return odd.eval((sa + sb) / 2) > 0


@dataclass(frozen=True)
class Density(Measure):
    """Piecewise-polynomial density with respect to Lebesgue measure.

    ``breakpoints`` runs from 0 to 1 inclusive; ``coeffs[i]`` holds the
    ascending-power coefficients of the polynomial (in the absolute variable
    ``x``) used on ``[breakpoints[i], breakpoints[i+1])``.
    """

    breakpoints: tuple = (ZERO, ONE)
    coeffs: tuple = ((ONE,),)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        cfs = tuple(tuple(as_rational(c) for c in row) for row in self.coeffs)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise InvalidMeasure("density breakpoints must start at 0 and end at 1")
        if any(lo >= hi for lo, hi in zip(bps, bps[1:])):
            raise InvalidMeasure("density breakpoints must be strictly increasing")
        if len(cfs) != len(bps) - 1:
            raise InvalidMeasure(f"expected {len(bps) - 1} coefficient rows, got {len(cfs)}")
        for i, row in enumerate(cfs):
            if not row:
                raise InvalidMeasure(f"coefficient row {i} is empty")
            if not _nonnegative_on(row, bps[i], bps[i + 1]):
                raise InvalidMeasure(f"density piece {i} takes negative values")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "coeffs", cfs)
        _init_cache(self)
        anti = tuple(_poly_antiderivative(row) for row in cfs)
        cum = [ZERO]
        for i, row in enumerate(anti):
            cum.append(cum[-1] + _poly_eval(row, bps[i + 1]) - _poly_eval(row, bps[i]))
        object.__setattr__(self, "_anti", anti)
        object.__setattr__(self, "_cum", cum)

    def _cdf(self, x, digits):
        if x <= 0:
            return ZERO, ZERO
        if x >= 1:
            return self._cum[-1], ZERO
        i = bisect.bisect_right(self.breakpoints, x) - 1
        row = self._anti[i]
        return self._cum[i] + _poly_eval(row, x) - _poly_eval(row, self.breakpoints[i]), ZERO

    @property
    def total(self):
        return self._cum[-1]

    def interior_breakpoints(self):
        return frozenset(self.breakpoints[1:-1])

    def density_at(self, x) -> Fraction:
        x = as_rational(x)
        bps = self.breakpoints
        i = min(bisect.bisect_right(bps, x) - 1, len(self.coeffs) - 1)
        return _poly_eval(self.coeffs[i], x)


def cantor_function(x: Fraction, max_digits: int = _MIN_CANTOR_DIGITS) -> tuple[Fraction, Fraction]:
    """Value of the Cantor function at a rational ``x`` with an error bound.

    Walks the ternary expansion of ``x``.  The value is exact when the
    expansion terminates, reaches a digit 1 (``x`` lies in a removed middle
    third), or becomes periodic within ``max_digits`` digits; otherwise the
    midpoint of the remaining dyadic bracket is returned.
    """
    if x <= 0:
        return ZERO, ZERO
    if x >= 1:
        return ONE, ZERO
    den = x.denominator
    r = x.numerator
    bits = 0
    seen: dict[int, tuple[int, int]] = {}
    for i in range(max_digits):
        if r in seen:
            j, bits_j = seen[r]
            period = i - j
            block = bits - (bits_j << period)
            value = Fraction(bits_j, 1 << j) + Fraction(block, (1 << j) * ((1 << period) - 1))
            return value, ZERO
        seen[r] = (i, bits)
        r3 = 3 * r
        digit, r = divmod(r3, den)
        if digit == 1:
            return Fraction(2 * bits + 1, 1 << (i + 1)), ZERO
        bits = 2 * bits + (digit >> 1)
        if r == 0:
            return Fraction(bits, 1 << (i + 1)), ZERO
    n = max_digits
    return Fraction(2 * bits + 1, 1 << (n + 1)), Fraction(1, 1 << (n + 1))


@dataclass(frozen=True)
class Cantor(Measure):
    """``weight`` times the uniform measure on the middle-thirds Cantor set."""

    weight: Fraction = ONE
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        w = as_rational(self.weight)
        if w < 0:
            raise InvalidMeasure(f"Cantor weight {w} is negative")
        object.__setattr__(self, "weight", w)
        _init_cache(self)

    def _cdf(self, x, digits):
        value, err = cantor_function(x, digits)
        return self.weight * value, self.weight * err

    @property
    def total(self):
        return self.weight

    def has_cantor(self):
        return True

    def cantor_weight(self):
        return self.weight


@dataclass(frozen=True)
class Sum(Measure):
    parts: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        parts = tuple(self.parts)
        for p in parts:
            if not isinstance(p, Measure):
                raise InvalidMeasure(f"Sum part {p!r} is not a measure")
        object.__setattr__(self, "parts", parts)
        _init_cache(self)

    def _cdf(self, x, digits):
        value, err = ZERO, ZERO
        for p in self.parts:
            v, e = p.cdf(x, digits)
            value += v
            err += e
        return value, err

    @property
    def total(self):
        return sum((p.total for p in self.parts), ZERO)

    def atom_locations(self):
        return frozenset().union(*(p.atom_locations() for p in self.parts))

    def interior_breakpoints(self):
        return frozenset().union(*(p.interior_breakpoints() for p in self.parts))

    def has_cantor(self):
        return any(p.has_cantor() for p in self.parts)

    def cantor_weight(self):
        return sum((p.cantor_weight() for p in self.parts), ZERO)


@dataclass(frozen=True)
class Scale(Measure):
    factor: Fraction = ONE
    inner: Measure = None  # type: ignore[assignment]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        f = as_rational(self.factor)
        if f < 0:
            raise InvalidMeasure(f"scale factor {f} is negative")
        if not isinstance(self.inner, Measure):
            raise InvalidMeasure("Scale needs an inner measure")
        object.__setattr__(self, "factor", f)
        _init_cache(self)

    def _cdf(self, x, digits):
        v, e = self.inner.cdf(x, digits)
        return self.factor * v, self.factor * e

    @property
    def total(self):
        return self.factor * self.inner.total

    def atom_locations(self):
        return self.inner.atom_locations()

    def interior_breakpoints(self):
        return self.inner.interior_breakpoints()

    def has_cantor(self):
        return self.inner.has_cantor()

    def cantor_weight(self):
        return self.factor * self.inner.cantor_weight()


# -- convenience constructors ---------------------------------------------
def lebesgue(weight=1) -> Density:
    return Density((ZERO, ONE), ((as_rational(weight),),))


def dirac(location, weight=1) -> Atoms:
    return Atoms(((as_rational(location), as_rational(weight)),))


def piecewise_constant(breakpoints: Iterable, values: Iterable) -> Density:
    """Step density; ``breakpoints`` must include 0 and 1."""
    return Density(tuple(breakpoints), tuple((as_rational(v),) for v in values))


# -- set functions --------------------------------------------------------
def _cantor_digits(m: Measure, n_pieces: int, tolerance: Fraction) -> int:
    cw = m.cantor_weight()
    if cw == 0 or tolerance <= 0:
        return _MIN_CANTOR_DIGITS
    # per-endpoint bracket half-width eps on the Cantor function keeps the
    # summed error <= 2 * n_pieces * cw * eps <= tolerance
    eps = tolerance / (2 * max(n_pieces, 1) * cw)
    needed = math.ceil(math.log2(eps.denominator) - math.log2(eps.numerator))
    return max(_MIN_CANTOR_DIGITS, needed)


def mass(
    m: Measure,
    s,
    *,
    exact: bool = False,
    cantor_tolerance: Fraction = DEFAULT_CANTOR_TOLERANCE,
) -> MassResult:
    """Mass ``m(s)`` of a canonical interval set.

    Exact for atoms and densities.  Cantor components are exact whenever the
    ternary expansion of every endpoint resolves; otherwise the result carries
    an ``error_bound <= cantor_tolerance``, and ``exact=True`` raises
    :class:`NonTriadicEndpoint`.
    """
    if not isinstance(s, IntervalSet):
        try:
            s = IntervalSet(s)
        except (TypeError, ValueError) as exc:
            raise InvalidSet(str(exc)) from exc
    digits = _cantor_digits(m, len(s), as_rational(cantor_tolerance))
    value, err = ZERO, ZERO
    for lo, hi in s:
        v_hi, e_hi = m.cdf(hi, digits)
        v_lo, e_lo = m.cdf(lo, digits)
        value += v_hi - v_lo
        err += e_hi + e_lo
    if err and exact:
        raise NonTriadicEndpoint(f"Cantor mass of {s!r} cannot be resolved exactly")
    if value < 0:
        # only reachable through bracket midpoints of a zero-width Cantor gap
        value = ZERO
    return MassResult(value, err == 0, err)


def interval_mass(m: Measure, lo: Fraction, hi: Fraction, digits: int = _MIN_CANTOR_DIGITS) -> Fraction:
    """Fast path ``m([lo, hi))`` for a single interval, value only."""
    return m.cdf(hi, digits)[0] - m.cdf(lo, digits)[0]


def total_mass(m: Measure) -> Fraction:
    return m.total


def _first_level(lo: Fraction, hi: Fraction, base: int) -> int:
    """Smallest level ``L >= 1`` with a grid point ``k / base**L`` strictly inside (lo, hi)."""
    lp, lq, hp, hq = lo.numerator, lo.denominator, hi.numerator, hi.denominator
    level, scale = 1, base
    while True:
        # floor(lo * scale) + 1 <= ceil(hi * scale) - 1, in integers
        if (lp * scale) // lq + 1 <= -((-hp * scale) // hq) - 1:
            return level
        level += 1
        scale *= base


def _grid_points(lo: Fraction, hi: Fraction, base: int, levels: range) -> set:
    out = set()
    for level in levels:
        scale = base**level
        k_lo = (lo.numerator * scale) // lo.denominator + 1
        k_hi = -((-hi.numerator * scale) // hi.denominator) - 1
        out.update(Fraction(k, scale) for k in range(k_lo, k_hi + 1))
    return out


def candidate_points(m: Measure, within: IntervalSet, depth: int, *, window: int | None = None) -> list[Fraction]:
    """Sorted split candidates strictly inside ``within``.

    Atom locations and density breakpoints, dyadic points of level <= depth,
    and (when ``m`` has a Cantor component) triadic points of level <= depth.
    With ``window`` set, each piece only receives grid points from its first
    ``window`` occupied levels; the engine uses this to keep the candidate
    count per cell bounded while the depth keeps growing.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    bases = (2, 3) if m.has_cantor() else (2,)
    pts = {x for x in m.atom_locations() | m.interior_breakpoints() if within.is_interior_point(x)}
    for lo, hi in within:
        for base in bases:
            if depth == 0:
                continue
            first = 1
            if window is not None:
                first = _first_level(lo, hi, base)
                last = min(depth, first + window - 1)
            else:
                last = depth
            pts |= _grid_points(lo, hi, base, range(first, last + 1))
    return sorted(pts)
