"""Forward convex combinations and minimum-norm points of convex hulls.

For functions ``f_0, f_1, ...`` bounded in L²(m), the minimum-norm element
``g_n`` of ``co(f_k : k >= n)`` forms an L²-Cauchy sequence: the infimum
norms are nondecreasing and bounded, and the parallelogram law turns
near-equal norms into near-equal functions.  ``g_n`` only uses indices
``k >= n``, which is what makes it a *forward* convex combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import IterationBudgetExceeded
from .intervals import ONE, ZERO, format_rational
from .measures import Measure
from .simple_functions import SimpleFunction, l2_inner, linear_combination

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
_SNAP_DENOMINATOR = 10**15


@dataclass(frozen=True)
class ConvexWeights:
    """Exact convex weights over strictly increasing sequence indices."""

    indices: tuple
    weights: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        w = tuple(Fraction(x) for x in self.weights)
        if len(idx) != len(w):
            raise ValueError("indices and weights differ in length")
        if not idx:
            raise ValueError("empty convex combination")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if sum(w, ZERO) != ONE:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    @property
    def support(self) -> tuple:
        """Indices carrying positive weight."""
        return tuple(i for i, w in zip(self.indices, self.weights) if w)

    def as_dict(self) -> dict[int, Fraction]:
        return {i: w for i, w in zip(self.indices, self.weights) if w}

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "weights": [format_rational(w) for w in self.weights]}


class HullPoint(NamedTuple):
    weights: ConvexWeights
    norm2: float
    gap: float
    iterations: int


def gram(fs: Sequence[SimpleFunction], m: Measure) -> list[list[Fraction]]:
    """Exact Gram matrix ``G[j][k] = ∫ f_j f_k dm``."""
    n = len(fs)
    G = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        for k in range(j, n):
            G[j][k] = G[k][j] = l2_inner(fs[j], fs[k], m)
    return G


def _frank_wolfe(G: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, int]:
    """Away-step Frank–Wolfe for ``min wᵀGw`` over the probability simplex."""
    n = G.shape[0]
    w = np.zeros(n)
    w[int(np.argmin(np.diag(G)))] = 1.0
    for it in range(max_iter):
        grad = G @ w
        value = float(w @ grad)
        s = int(np.argmin(grad))
        if 2.0 * (value - grad[s]) <= tol:
            return w, it
        active = np.flatnonzero(w > 0)
        a = int(active[np.argmax(grad[active])])
        away = value - grad[s] < grad[a] - value
        if not away:
            d = -w.copy()
            d[s] += 1.0
            t_max = 1.0
        else:
            d = w.copy()
            d[a] -= 1.0
            t_max = w[a] / (1.0 - w[a]) if w[a] < 1.0 else math.inf
        curv = float(d @ G @ d)
        slope = float(d @ grad)
        t = t_max if curv <= 0 else min(t_max, max(0.0, -slope / curv))
        if t == 0.0:
            # numerically flat direction; nothing left to gain in floating point
            return w, it
        w = w + t * d
        if away and t == t_max:
            w[a] = 0.0  # drop step
        w[w < 0] = 0.0
    raise IterationBudgetExceeded(f"duality gap still above {tol} after {max_iter} iterations")


def _snap(w: np.ndarray) -> tuple[Fraction, ...]:
    q = [max(ZERO, Fraction(float(x)).limit_denominator(_SNAP_DENOMINATOR)) for x in w]
    total = sum(q, ZERO)
    if total == 0:
        q = [ONE] + [ZERO] * (len(q) - 1)
        total = ONE
    return tuple(x / total for x in q)


def _quad(G, w) -> Fraction:
    n = len(w)
    return sum((w[j] * G[j][k] * w[k] for j in range(n) if w[j] for k in range(n) if w[k]), ZERO)


def min_norm_from_gram(
    G: Sequence[Sequence[Fraction]], indices: Sequence[int] | None = None, *, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> HullPoint:
    """Minimum-norm point of a hull given its exact Gram matrix.

    Iterates in floating point, then snaps the weights to rationals that lie
    exactly on the simplex.  ``norm2`` and ``gap`` are evaluated from the
    snapped weights against the exact matrix; ``gap`` is the Frank–Wolfe
    certificate ``2 (wᵀGw - min_j (Gw)_j)``, an upper bound on the distance
    of ``norm2`` to the true minimum.
    """
    n = len(G)
    if n == 0:
        raise ValueError("need at least one function")
    indices = tuple(range(n)) if indices is None else tuple(indices)
    if all(G[j][j] == 0 for j in range(n)):
        return HullPoint(ConvexWeights(indices, (ONE,) + (ZERO,) * (n - 1)), 0.0, 0.0, 0)
    Gf = np.array([[float(x) for x in row] for row in G])
    w_float, iterations = _frank_wolfe(Gf, tol, max_iter)
    w = _snap(w_float)
    norm2 = _quad(G, w)
    grad = [sum((G[j][k] * w[k] for k in range(n) if w[k]), ZERO) for j in range(n)]
    gap = 2 * (norm2 - min(grad))
    if float(gap) > tol:
        raise IterationBudgetExceeded(f"duality gap {float(gap):.3e} exceeds tolerance {tol:.3e}")
    return HullPoint(ConvexWeights(indices, w), float(norm2), float(gap), iterations)


def min_norm_hull(
    fs: Sequence[SimpleFunction], m: Measure, tol: float = DEFAULT_TOL, *, max_iter: int = DEFAULT_MAX_ITER
) -> HullPoint:
    """Weights of the (near) minimum-L²(m)-norm element of ``co(fs)``.

    Examples
    --------
    >>> from rndiff.measures import lebesgue
    >>> from rndiff.partitions import dyadic_partition
    >>> r1 = SimpleFunction(dyadic_partition(1), (1, -1))
    >>> min_norm_hull([r1, r1.map(lambda v: -v)], lebesgue()).weights.weights
    (Fraction(1, 2), Fraction(1, 2))
    """
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one function")
    return min_norm_from_gram(gram(fs, m), tol=tol, max_iter=max_iter)


def combine(fs: Sequence[SimpleFunction], weights: ConvexWeights) -> SimpleFunction:
    """Evaluate ``Σ w_k f_k`` for weights indexing into ``fs``."""
    support = [(fs[i], w) for i, w in zip(weights.indices, weights.weights) if w]
    return linear_combination([f for f, _ in support], [w for _, w in support])


@dataclass
class FccSequence:
    """Tail minimum-norm points ``g_n`` with their weights and diagnostics."""

    functions: list[SimpleFunction]
    weights: list[ConvexWeights]
    norms2: list[float]
    gaps: list[float]
    distances: list[float]

    def __len__(self):
        return len(self.functions)


def fcc_sequence(
    fs: Sequence[SimpleFunction], m: Measure, tol: float = DEFAULT_TOL, *, max_iter: int = DEFAULT_MAX_ITER
) -> FccSequence:
    """``g_n`` = minimum-norm point of ``co(f_k : k >= n)`` for every ``n``.

    ``distances[n]`` is ``‖g_n - g_{n+1}‖_{L²(m)}``, the Cauchy evidence.
    The Gram matrix of the whole sequence is computed once and each tail
    problem uses its lower-right block.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("need at least one function")
    G = gram(fs, m)
    N = len(fs)
    out = FccSequence([], [], [], [], [])
    for n in range(N):
        block = [row[n:] for row in G[n:]]
        hp = min_norm_from_gram(block, range(n, N), tol=tol, max_iter=max_iter)
        out.weights.append(hp.weights)
        out.norms2.append(hp.norm2)
        out.gaps.append(hp.gap)
        out.functions.append(combine(fs, hp.weights))
    for n in range(N - 1):
        d2 = _tail_distance2(G, out.weights[n], out.weights[n + 1])
        out.distances.append(math.sqrt(max(float(d2), 0.0)))
    return out


def _tail_distance2(G, u: ConvexWeights, v: ConvexWeights) -> Fraction:
    diff: dict[int, Fraction] = dict(u.as_dict())
    for i, w in v.as_dict().items():
        diff[i] = diff.get(i, ZERO) - w
    items = [(i, c) for i, c in diff.items() if c]
    return sum((a * b * G[i][j] for i, a in items for j, b in items), ZERO)


def compose(outer: ConvexWeights, inner: Sequence[ConvexWeights]) -> ConvexWeights:
    """Weights over the base sequence of ``Σ_j outer_j g_j`` with ``g_j = inner[j]``."""
    acc: dict[int, Fraction] = {}
    for j, a in zip(outer.indices, outer.weights):
        if not a:
            continue
        for i, b in zip(inner[j].indices, inner[j].weights):
            acc[i] = acc.get(i, ZERO) + a * b
    keys = sorted(acc)
    return ConvexWeights(tuple(keys), tuple(acc[k] for k in keys))


def is_forward(weights: Sequence[ConvexWeights]) -> bool:
    """True iff the ``n``-th combination only charges indices ``>= n``."""
    return all(min(w.support, default=n) >= n for n, w in enumerate(weights))
