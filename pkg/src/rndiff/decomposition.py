"""Lebesgue decomposition of ν with respect to μ from a refined partition.

With ``h = f_π(γ)`` the cell-wise γ-density of ν (``γ = μ + ν``), the map
``ψ(x) = x / (1 - x)`` sends ``h`` to the μ-density of ν: on a cell with
``0 <= h < 1`` one has ``ψ(h) = ν(A) / μ(A)`` exactly.  ``h = 1`` (ψ = ∞)
marks cells of μ-mass zero, i.e. singular mass.  At finite resolution a
singular continuous part never produces ``h = 1`` exactly, so cells with
``h`` within ``singular_threshold`` of 1 are also routed to the singular part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .engine import EngineConfig, EngineOutput, run
from .exceptions import DomainError
from .intervals import ONE, ZERO, IntervalSet, as_rational, format_rational
from .measures import Measure
from .partitions import Partition
from .simple_functions import SimpleFunction, cell_masses

DEFAULT_SINGULAR_THRESHOLD = Fraction(1, 10**6)


def psi(x) -> Fraction | float:
    """``x / (1 - x)`` on [0, 1), and ``math.inf`` at 1.

    Examples
    --------
    >>> psi(Fraction(1, 2))
    Fraction(1, 1)
    >>> psi(1)
    inf
    """
    x = as_rational(x)
    if not (0 <= x <= 1):
        raise DomainError(f"psi is defined on [0, 1], got {x}")
    if x == 1:
        return math.inf
    return x / (1 - x)


def psi_inverse(g) -> Fraction:
    """``g / (1 + g)``; maps ``math.inf`` back to 1."""
    if g == math.inf:
        return ONE
    g = as_rational(g)
    if g < 0:
        raise DomainError(f"psi inverse needs g >= 0, got {g}")
    return g / (1 + g)


@dataclass
class Decomposition:
    """Cell-resolution Lebesgue decomposition.

    Attributes
    ----------
    density : SimpleFunction
        Approximation of dν^a/dμ on the final partition.
    singular_mass : Fraction
        Estimate of ν^s(Ω), the ν-mass of the flagged cells.
    singular_cells : IntervalSet
        Union of the flagged cells.
    residual : Fraction
        ``|ν(Ω) - ∫ density dμ - singular_mass|``.
    engine : EngineOutput
        The refinement run the decomposition was read from.
    """

    density: SimpleFunction
    singular_mass: Fraction
    singular_cells: IntervalSet
    residual: Fraction
    engine: EngineOutput
    singular_threshold: Fraction = DEFAULT_SINGULAR_THRESHOLD

    @property
    def total_nu(self) -> Fraction:
        return self.engine.nu.total

    @property
    def residual_signed(self) -> Fraction:
        return self.total_nu - self.density_integral - self.singular_mass

    @property
    def density_integral(self) -> Fraction:
        masses = cell_masses(self.engine.mu, self.density.partition)
        return sum((v * w for v, w in zip(self.density.values, masses)), ZERO)

    def to_json(self) -> dict:
        return {
            "density": self.density.to_json(),
            "singular_mass": format_rational(self.singular_mass),
            "singular_cells": self.singular_cells.to_json(),
            "residual": format_rational(self.residual),
            "singular_threshold": format_rational(self.singular_threshold),
            "terminated_by": self.engine.terminated_by,
            "rounds": self.engine.trace.rounds[-1].round,
            "a_n": self.engine.a,
        }


def classify_cells(nu: Measure, mu: Measure, pi: Partition, singular_threshold=DEFAULT_SINGULAR_THRESHOLD):
    """Density values, singular mass and flagged cells of ``pi``.

    Returns ``(density, singular_mass, flagged_cells)``.  A cell is flagged
    when it carries ν-mass and either ``μ(A) = 0`` (``ψ(h) = ∞``) or
    ``h(A) >= 1 - singular_threshold``; flagged cells get density 0 and hand
    their whole ν-mass to the singular part.
    """
    tau = as_rational(singular_threshold)
    if not (0 <= tau < 1):
        raise DomainError(f"singular_threshold must lie in [0, 1), got {tau}")
    nus = cell_masses(nu, pi)
    mus = cell_masses(mu, pi)
    values = []
    singular = ZERO
    flagged = []
    for cell, n, m in zip(pi.cells, nus, mus):
        h = n / (n + m) if n + m > 0 else ZERO
        if n > 0 and (m == 0 or h >= 1 - tau):
            singular += n
            flagged.append(cell)
            values.append(ZERO)
        else:
            values.append(n / m if m > 0 else ZERO)
    return SimpleFunction(pi, tuple(values)), singular, flagged


def decompose_partition(
    nu: Measure, mu: Measure, engine: EngineOutput, singular_threshold=DEFAULT_SINGULAR_THRESHOLD
) -> Decomposition:
    """Read the decomposition off the final partition of ``engine``."""
    tau = as_rational(singular_threshold)
    density, singular, flagged = classify_cells(nu, mu, engine.final_partition, tau)
    integral = sum((v * m for v, m in zip(density.values, cell_masses(mu, density.partition))), ZERO)
    residual = abs(nu.total - integral - singular)
    cells = IntervalSet.from_pieces(p for c in flagged for p in c)
    return Decomposition(density, singular, cells, residual, engine, tau)


def decompose(
    nu: Measure, mu: Measure, config: EngineConfig | None = None, singular_threshold=DEFAULT_SINGULAR_THRESHOLD
) -> Decomposition:
    """Refine ``π`` for ``(ν, γ = μ + ν)`` and split ν into density and singular mass."""
    engine = run(nu, mu, config)
    return decompose_partition(nu, mu, engine, singular_threshold)


def derivative(nu: Measure, mu: Measure, config: EngineConfig | None = None, singular_threshold=DEFAULT_SINGULAR_THRESHOLD) -> SimpleFunction:
    """Approximate dν^a/dμ as a simple function on the refined partition."""
    return decompose(nu, mu, config, singular_threshold).density
