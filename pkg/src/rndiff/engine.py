"""Greedy partition refinement that maximises ``π ↦ ∫ exp(-f_π(γ)) dγ``.

With ``γ = μ + ν`` the functional is nondecreasing under refinement, and an
increasing sequence of partitions along which it approaches its supremum
yields ``f_{π_n}(μ) → dν^a/dμ`` μ-a.e.  The engine builds such a sequence by
splitting cells at candidate points (atoms, density breakpoints, dyadic and
triadic grid points) chosen by their exact-mass gain.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .exceptions import BaseDominationViolated, ConfigError, MonotonicityViolation, TraceError
from .intervals import ZERO, IntervalSet, as_rational, format_rational
from .measures import DEFAULT_CANTOR_TOLERANCE, Measure, Sum, _cantor_digits, _first_level, candidate_points
from .partitions import Partition, trivial_partition
from .simple_functions import SimpleFunction, exp_term, f_pi

SPLIT_MODES = ("best", "all")
MONOTONE_SLACK = 1e-12


def default_depth_schedule(round_index: int) -> int:
    return round_index


@dataclass
class EngineConfig:
    """Knobs of :func:`run`.

    ``local_levels`` bounds the candidate grid of each cell to its first few
    occupied dyadic/triadic levels; the global depth schedule still caps how
    fine those levels may be.  ``max_cells`` stops runs whose partition would
    grow past a memory/time budget (reported as ``terminated_by="cell_limit"``).
    """

    max_rounds: int = 30
    gain_tolerance: float = 1e-12
    split_mode: str = "best"
    depth_schedule: Callable[[int], int] = default_depth_schedule
    cantor_tolerance: Fraction = DEFAULT_CANTOR_TOLERANCE
    local_levels: int = 3
    max_cells: int = 4096
    checkpoint_stride: int = 1

    def __post_init__(self):
        if not isinstance(self.max_rounds, int) or self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be an integer >= 1, got {self.max_rounds!r}")
        if not self.gain_tolerance > 0:
            raise ConfigError(f"gain_tolerance must be > 0, got {self.gain_tolerance!r}")
        if self.split_mode not in SPLIT_MODES:
            raise ConfigError(f"split_mode must be one of {SPLIT_MODES}, got {self.split_mode!r}")
        if not callable(self.depth_schedule):
            raise ConfigError("depth_schedule must be callable")
        try:
            self.cantor_tolerance = as_rational(self.cantor_tolerance)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cantor_tolerance: {exc}") from None
        if self.cantor_tolerance <= 0:
            raise ConfigError("cantor_tolerance must be > 0")
        if self.local_levels < 1:
            raise ConfigError("local_levels must be >= 1")
        if self.max_cells < 2:
            raise ConfigError("max_cells must be >= 2")
        if self.checkpoint_stride < 1:
            raise ConfigError("checkpoint_stride must be >= 1")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    cells: int
    a: float
    l1_increment: Fraction
    seconds: float = 0.0


@dataclass
class RefinementTrace:
    rounds: list[RoundRecord] = field(default_factory=list)
    gamma_mass: Fraction | None = None

    @property
    def a_values(self) -> list[float]:
        return [r.a for r in self.rounds]

    def to_csv(self, timing: bool = False) -> str:
        """CSV with columns ``round,cells,a_n,l1_increment,seconds``.

        ``seconds`` is left blank unless ``timing`` is set, so that identical
        runs produce byte-identical files.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "cells", "a_n", "l1_increment", "seconds"])
        for r in self.rounds:
            w.writerow([r.round, r.cells, repr(r.a), format_rational(r.l1_increment), f"{r.seconds:.6f}" if timing else ""])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RefinementTrace":
        rows = list(csv.DictReader(io.StringIO(text)))
        need = {"round", "cells", "a_n", "l1_increment", "seconds"}
        if not rows and not text.strip():
            raise TraceError("empty trace")
        try:
            if rows and not need <= set(rows[0]):
                raise TraceError(f"trace CSV needs columns {sorted(need)}")
            return cls(
                [
                    RoundRecord(int(r["round"]), int(r["cells"]), float(r["a_n"]), as_rational(r["l1_increment"]), float(r["seconds"] or 0))
                    for r in rows
                ]
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise TraceError(f"malformed trace row: {exc}") from None

    def to_json(self) -> dict:
        return {
            "gamma_mass": None if self.gamma_mass is None else format_rational(self.gamma_mass),
            "rounds": [
                {"round": r.round, "cells": r.cells, "a_n": r.a, "l1_increment": format_rational(r.l1_increment), "seconds": r.seconds}
                for r in self.rounds
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RefinementTrace":
        try:
            gm = data.get("gamma_mass")
            return cls(
                [RoundRecord(int(r["round"]), int(r["cells"]), float(r["a_n"]), as_rational(r["l1_increment"]), float(r.get("seconds", 0))) for r in data["rounds"]],
                None if gm is None else as_rational(gm),
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise TraceError(f"malformed trace: {exc}") from None


@dataclass
class EngineOutput:
    final_partition: Partition
    f_gamma: SimpleFunction
    f_mu: SimpleFunction
    trace: RefinementTrace
    terminated_by: str
    nu: Measure
    mu: Measure
    gamma: Measure
    history: list[tuple[int, Partition]] = field(default_factory=list)

    @property
    def a(self) -> float:
        return self.trace.rounds[-1].a

    def f_gamma_sequence(self) -> list[SimpleFunction]:
        """``f_{π_n}(γ)`` for every checkpointed partition, in round order."""
        return [f_pi(self.nu, self.gamma, pi) for _, pi in self.history]


class _Cell:
    __slots__ = ("set", "nu", "gamma", "term", "cap", "cache")

    def __init__(self, s: IntervalSet, nu: Fraction, gamma: Fraction, cap: int):
        self.set = s
        self.nu = nu
        self.gamma = gamma
        self.term = exp_term(nu, gamma)
        self.cap = cap
        self.cache: dict[int, list[tuple[float, Fraction]]] = {}


class _Refiner:
    """Mutable working state of one engine run (cells plus cached masses)."""

    def __init__(self, nu: Measure, gamma: Measure, config: EngineConfig, partition: Partition):
        self.nu = nu
        self.gamma = gamma
        self.config = config
        self.digits = _cantor_digits(gamma, 2 * config.max_cells, config.cantor_tolerance)
        self.bases = (2, 3) if gamma.has_cantor() else (2,)
        self.cells = [self._make_cell(c) for c in partition.cells]

    # -- masses ---------------------------------------------------------
    def _mass(self, m: Measure, s: IntervalSet) -> Fraction:
        d = self.digits
        return sum((m.cdf(hi, d)[0] - m.cdf(lo, d)[0] for lo, hi in s), ZERO)

    def _make_cell(self, s: IntervalSet) -> _Cell:
        n, g = self._mass(self.nu, s), self._mass(self.gamma, s)
        if n > g:
            raise BaseDominationViolated(f"cell {s!r}: nu = {n} exceeds base = {g}")
        cap = max(_first_level(lo, hi, b) for lo, hi in s for b in self.bases) + self.config.local_levels - 1
        return _Cell(s, n, g, cap)

    def a(self) -> float:
        return math.fsum(c.term for c in self.cells)

    def partition(self) -> Partition:
        return Partition((c.set for c in self.cells), validate=False)

    # -- candidate gains ------------------------------------------------
    def proposals(self, cell: _Cell, depth: int) -> list[tuple[float, Fraction]]:
        depth = min(depth, cell.cap)
        hit = cell.cache.get(depth)
        if hit is not None:
            return hit
        out = []
        if cell.gamma > 0:
            for x in candidate_points(self.gamma, cell.set, depth, window=self.config.local_levels):
                left, _ = cell.set.split_at(x)
                n_l, g_l = self._mass(self.nu, left), self._mass(self.gamma, left)
                gain = exp_term(n_l, g_l) + exp_term(cell.nu - n_l, cell.gamma - g_l) - cell.term
                out.append((gain, x))
        cell.cache = {depth: out}
        return out

    def _choose(self, depth: int, room: int) -> dict[int, list[Fraction]]:
        cfg = self.config
        chosen: dict[int, list[Fraction]] = {}
        if cfg.split_mode == "best":
            best = None
            for idx, cell in enumerate(self.cells):
                for gain, x in self.proposals(cell, depth):
                    if best is None or gain > best[0]:
                        best = (gain, idx, x)
            if best is not None and best[0] > cfg.gain_tolerance:
                chosen[best[1]] = [best[2]]
        else:
            improving = [
                (-gain, idx, x)
                for idx, cell in enumerate(self.cells)
                for gain, x in self.proposals(cell, depth)
                if gain > cfg.gain_tolerance
            ]
            improving.sort()
            for _, idx, x in improving[:room]:
                chosen.setdefault(idx, []).append(x)
        return chosen

    def step(self, round_index: int) -> tuple[bool, Fraction]:
        """One refinement round; returns (anything split?, L1(γ) increment).

        The depth schedule is a floor: if no candidate improves at the
        scheduled depth, the round deepens until some cell improves or every
        cell's local window is exhausted.
        """
        cfg = self.config
        room = cfg.max_cells - len(self.cells)
        if room <= 0:
            return False, ZERO
        depth = max(cfg.depth_schedule(round_index), 0)
        deepest = max(c.cap for c in self.cells)
        chosen = self._choose(depth, room)
        while not chosen and depth < deepest:
            depth += 1
            chosen = self._choose(depth, room)
        if not chosen:
            return False, ZERO
        l1 = ZERO
        new_cells: list[_Cell] = []
        for idx, cell in enumerate(self.cells):
            points = chosen.get(idx)
            if not points:
                new_cells.append(cell)
                continue
            h_parent = cell.nu / cell.gamma
            rest = cell.set
            pieces = []
            for x in sorted(points):
                left, rest = rest.split_at(x)
                pieces.append(left)
            pieces.append(rest)
            for p in pieces:
                sub = self._make_cell(p)
                if sub.gamma > 0:
                    l1 += abs(sub.nu / sub.gamma - h_parent) * sub.gamma
                new_cells.append(sub)
        new_cells.sort(key=lambda c: c.set.left)
        self.cells = new_cells
        return True, l1

    def functions(self, mu: Measure) -> tuple[SimpleFunction, SimpleFunction]:
        pi = self.partition()
        f_gamma = SimpleFunction(pi, tuple(c.nu / c.gamma if c.gamma > 0 else ZERO for c in self.cells))
        mus = [self._mass(mu, c.set) for c in self.cells]
        f_mu = SimpleFunction(pi, tuple(c.nu / m if m > 0 else ZERO for c, m in zip(self.cells, mus)))
        return f_gamma, f_mu


def refine_round(
    nu: Measure, gamma: Measure, pi: Partition, config: EngineConfig | None = None, round_index: int = 1
) -> tuple[Partition, float]:
    """Apply one refinement round to ``pi``; returns the new partition and the functional gain."""
    config = config or EngineConfig()
    state = _Refiner(nu, gamma, config, pi)
    before = state.a()
    changed, _ = state.step(round_index)
    if not changed:
        return pi, 0.0
    return state.partition(), state.a() - before


def run(nu: Measure, mu: Measure, config: EngineConfig | None = None) -> EngineOutput:
    """Refine from the trivial partition until the gain stalls or a budget runs out."""
    config = config or EngineConfig()
    if not isinstance(nu, Measure) or not isinstance(mu, Measure):
        raise ConfigError("nu and mu must be Measure instances")
    gamma = Sum((mu, nu))
    state = _Refiner(nu, gamma, config, trivial_partition())
    trace = RefinementTrace(gamma_mass=gamma.total)
    t0 = time.perf_counter()
    trace.rounds.append(RoundRecord(0, 1, state.a(), ZERO, 0.0))
    history = [(0, state.partition())]
    terminated_by = "round_limit"
    for r in range(1, config.max_rounds + 1):
        if len(state.cells) >= config.max_cells:
            terminated_by = "cell_limit"
            break
        changed, l1 = state.step(r)
        if not changed:
            terminated_by = "gain_below_tolerance"
            break
        trace.rounds.append(RoundRecord(r, len(state.cells), state.a(), l1, time.perf_counter() - t0))
        if r % config.checkpoint_stride == 0 or r == config.max_rounds:
            history.append((r, state.partition()))
    final = state.partition()
    if history[-1][1] != final:
        history.append((trace.rounds[-1].round, final))
    f_gamma, f_mu = state.functions(mu)
    return EngineOutput(final, f_gamma, f_mu, trace, terminated_by, nu, mu, gamma, history)


@dataclass(frozen=True)
class TraceReport:
    rounds: int
    monotone: bool
    min_increment: float
    jensen_checked: bool
    zero_gain_rounds: int


def verify_trace(trace: RefinementTrace, *, slack: float = MONOTONE_SLACK) -> TraceReport:
    """Check monotonicity of ``a_n`` and the strict-Jensen link between gain and change.

    Between consecutive rounds the gain is a sum of convexity gaps of
    ``exp(-·)`` on [0, 1], where the second derivative is >= 1/e, so
    ``a_n - a_{n-1} >= ‖Δf‖²_{L¹(γ)} / (2e γ(Ω))``.  In particular a zero
    gain forces the refined function to equal its parent γ-a.e.  That bound
    is only checked when the trace records ``γ(Ω)``.
    """
    rs = trace.rounds
    if not rs:
        raise TraceError("trace has no rounds")
    min_inc = math.inf
    zero = 0
    for prev, cur in zip(rs, rs[1:]):
        inc = cur.a - prev.a
        min_inc = min(min_inc, inc)
        if inc < -slack:
            raise MonotonicityViolation(f"a_n decreased at round {cur.round}: {prev.a!r} -> {cur.a!r}")
        if cur.cells <= prev.cells:
            raise MonotonicityViolation(f"cell count did not increase at round {cur.round}")
        if abs(inc) <= slack:
            zero += 1
        if trace.gamma_mass:
            bound = float(cur.l1_increment) ** 2 / (2 * math.e * float(trace.gamma_mass))
            if inc < bound - slack:
                raise MonotonicityViolation(
                    f"round {cur.round}: gain {inc:.3e} below strict-Jensen bound {bound:.3e} for L1 change {float(cur.l1_increment):.3e}"
                )
    return TraceReport(len(rs), True, 0.0 if min_inc is math.inf else min_inc, bool(trace.gamma_mass), zero)
