"""Independent reference computations used by the test-suite.

None of these call into the code paths they check: masses are recomputed
by Riemann sums or digit expansions, partitions are compared on an
elementary grid, and functional values come from closed forms.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


# -- masses -----------------------------------------------------------------
def riemann_mass(breakpoints, coeffs, a: float, b: float, n: int = 200_000) -> float:
    """Midpoint-rule integral of a piecewise polynomial density over [a, b)."""
    total = 0.0
    for (lo, hi), row in zip(zip(breakpoints, breakpoints[1:]), coeffs):
        lo, hi = max(float(lo), a), min(float(hi), b)
        if hi <= lo:
            continue
        x = lo + (np.arange(n) + 0.5) * (hi - lo) / n
        y = np.polynomial.polynomial.polyval(x, [float(c) for c in row])
        total += float(y.sum()) * (hi - lo) / n
    return total


def cantor_cdf_triadic(k: int, n: int) -> Fraction:
    """Cantor function at ``k / 3**n`` from the base-3 digits of ``k``.

    Digits are read left to right; a 1 ends the expansion (the point sits in
    a removed middle third), 0/2 become binary 0/1.
    """
    if k >= 3**n:
        return Fraction(1)
    digits = []
    for _ in range(n):
        digits.append(k % 3)
        k //= 3
    digits.reverse()
    value = Fraction(0)
    for i, d in enumerate(digits, start=1):
        if d == 1:
            return value + Fraction(1, 2**i)
        value += Fraction(d // 2, 2**i)
    return value


# -- partitions on an elementary grid ----------------------------------------
def grid_of(*partitions):
    """Sorted endpoints of every piece of every partition."""
    pts = {Fraction(0), Fraction(1)}
    for p in partitions:
        for cell in p.cells:
            for lo, hi in cell:
                pts.update((lo, hi))
    return sorted(pts)


def labels(p, grid):
    """Cell index of each elementary interval ``[grid[i], grid[i+1])``."""
    out = []
    for lo in grid[:-1]:
        hits = [k for k, cell in enumerate(p.cells) if cell.contains_point(lo)]
        assert len(hits) == 1
        out.append(hits[0])
    return out


def blocks(lab):
    """The partition of elementary positions induced by a labelling."""
    groups = {}
    for i, l in enumerate(lab):
        groups.setdefault(l, []).append(i)
    return frozenset(frozenset(g) for g in groups.values())


def blocks_refine(coarse, fine) -> bool:
    return all(any(f <= c for c in coarse) for f in fine)


def join_blocks(a, b):
    return frozenset(x & y for x in a for y in b if x & y)


# -- functional closed forms -------------------------------------------------
def sup_functional_piecewise_constant(lengths, values, mu_scale=1) -> float:
    """``∫ exp(-dν/dγ) dγ`` for ν = f·λ, μ = c·λ with f piecewise constant."""
    c = float(mu_scale)
    return math.fsum(float(L) * (c + float(f)) * math.exp(-float(f) / (c + float(f))) for L, f in zip(lengths, values))


def sup_functional_atoms(atom_mass, mu_mass) -> float:
    """``ν ⊥ μ``: dν/dγ is 1 on ν's support and 0 elsewhere."""
    return math.exp(-1) * float(atom_mass) + float(mu_mass)


# -- minimum norm on a simplex grid -------------------------------------------
def brute_force_min_norm(G, steps: int = 60):
    """Minimum of ``wᵀGw`` over a regular grid on the simplex (n <= 3)."""
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    best = math.inf
    for combo in itertools.product(range(steps + 1), repeat=n - 1):
        if sum(combo) > steps:
            continue
        w = np.array([*combo, steps - sum(combo)], dtype=float) / steps
        best = min(best, float(w @ G @ w))
    return best
