"""scikit-learn style front end for the decomposition pipeline."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .decomposition import DEFAULT_SINGULAR_THRESHOLD, decompose
from .engine import EngineConfig
from .exceptions import ConfigError
from .intervals import as_rational
from .measures import Measure, lebesgue
from .spec_io import loads_measure, parse_measure


def check_measure(m, name: str = "measure") -> Measure:
    """Accept a :class:`Measure`, a decoded spec document or a JSON string."""
    if isinstance(m, Measure):
        return m
    if isinstance(m, str):
        return loads_measure(m)
    if isinstance(m, dict):
        return parse_measure(m)
    raise TypeError(f"{name} must be a Measure, a spec dict or a JSON string, got {type(m).__name__}")


def check_points(X) -> np.ndarray:
    """Flatten ``X`` to a 1-d float array of query points in [0, 1)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d array of points (or shape (n, 1)), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    if arr.size and (arr.min() < 0 or arr.max() >= 1):
        raise ValueError("points must lie in [0, 1)")
    return arr


class RadonNikodymEstimator(BaseEstimator):
    """Estimate dν^a/dμ by greedy partition refinement.

    Parameters
    ----------
    max_rounds : int
        Refinement round budget.
    gain_tolerance : float
        Stop once no split improves the functional by more than this.
    split_mode : {"best", "all"}
        Apply only the best split per round, or every improving one.
    singular_threshold : str, int or Fraction
        Cells whose γ-density ``h`` is within this of 1 count as singular.
    local_levels : int
        Grid levels searched per cell beyond its first occupied one.
    max_cells : int
        Partition size budget.

    Attributes
    ----------
    partition_ : Partition
    density_ : SimpleFunction
    singular_mass_ : Fraction
    singular_cells_ : IntervalSet
    residual_ : Fraction
    trace_ : RefinementTrace
    terminated_by_ : str

    Examples
    --------
    >>> from rndiff import RadonNikodymEstimator, piecewise_constant
    >>> nu = piecewise_constant([0, "1/2", 1], ["3/2", "1/2"])
    >>> est = RadonNikodymEstimator(max_rounds=5).fit(nu)
    >>> est.predict([0.25, 0.75]).tolist()
    [1.5, 0.5]
    """

    def __init__(
        self,
        max_rounds: int = 30,
        gain_tolerance: float = 1e-12,
        split_mode: str = "best",
        singular_threshold=DEFAULT_SINGULAR_THRESHOLD,
        local_levels: int = 3,
        max_cells: int = 4096,
    ):
        self.max_rounds = max_rounds
        self.gain_tolerance = gain_tolerance
        self.split_mode = split_mode
        self.singular_threshold = singular_threshold
        self.local_levels = local_levels
        self.max_cells = max_cells

    def _config(self) -> EngineConfig:
        return EngineConfig(
            max_rounds=self.max_rounds,
            gain_tolerance=self.gain_tolerance,
            split_mode=self.split_mode,
            local_levels=self.local_levels,
            max_cells=self.max_cells,
        )

    def fit(self, nu, mu=None):
        """Run the refinement for ν against μ (Lebesgue when omitted)."""
        nu = check_measure(nu, "nu")
        mu = lebesgue() if mu is None else check_measure(mu, "mu")
        try:
            tau = as_rational(self.singular_threshold)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"singular_threshold: {exc}") from None
        result = decompose(nu, mu, self._config(), tau)
        self.decomposition_ = result
        self.partition_ = result.density.partition
        self.density_ = result.density
        self.singular_mass_ = result.singular_mass
        self.singular_cells_ = result.singular_cells
        self.residual_ = result.residual
        self.trace_ = result.engine.trace
        self.terminated_by_ = result.engine.terminated_by
        return self

    def _check_fitted(self):
        if not hasattr(self, "density_"):
            raise NotFittedError("call fit before using this estimator")

    def predict_exact(self, X) -> list[Fraction]:
        """Density values as exact rationals at the query points."""
        self._check_fitted()
        return [self.density_.value_at(Fraction(float(x))) for x in check_points(X)]

    def predict(self, X) -> np.ndarray:
        """Density values at the query points."""
        return np.array([float(v) for v in self.predict_exact(X)])

    def transform(self, X) -> np.ndarray:
        """Column stack of (density, singular-cell indicator) per query point."""
        self._check_fitted()
        pts = check_points(X)
        dens = self.predict(pts)
        sing = np.array([self.singular_cells_.contains_point(Fraction(float(x))) for x in pts], dtype=float)
        return np.column_stack([dens, sing])
