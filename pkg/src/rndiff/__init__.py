"""Radon–Nikodym derivatives and Lebesgue decompositions on [0, 1) by partition refinement.

Masses are exact rationals; a greedy engine refines finite partitions so as
to maximise ``∫ exp(-f_π(γ)) dγ`` with ``γ = μ + ν``, and the refined
partition yields the density of the absolutely continuous part of ν and an
estimate of its singular mass.
"""

from .decomposition import Decomposition, decompose, decompose_partition, derivative, psi, psi_inverse
from .engine import EngineConfig, EngineOutput, RefinementTrace, RoundRecord, refine_round, run, verify_trace
from .estimator import RadonNikodymEstimator, check_measure, check_points
from .exceptions import (
    BaseDominationViolated,
    ConfigError,
    DomainError,
    InvalidMeasure,
    InvalidPartition,
    InvalidSet,
    IterationBudgetExceeded,
    MonotonicityViolation,
    NonTriadicEndpoint,
    NotARefinement,
    PointNotInterior,
    RNDiffError,
    SpecError,
    TraceError,
)
from .fcc import ConvexWeights, FccSequence, compose, fcc_sequence, gram, is_forward, min_norm_hull
from .intervals import IntervalSet, as_rational, format_rational
from .measures import (
    Atoms,
    Cantor,
    Density,
    MassResult,
    Measure,
    MeasureSpec,
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
from .partitions import Partition, common_refinement, dyadic_partition, from_breakpoints, is_refinement, split_cell, trivial_partition
from .simple_functions import (
    SimpleFunction,
    conditional_expectation,
    convexity_gap,
    exp_functional,
    f_pi,
    integrate,
    l1_distance,
    l2_inner,
)
from .spec_io import dumps_measure, load_measure, loads_measure, measure_to_json, parse_measure

__version__ = "0.1.0"
