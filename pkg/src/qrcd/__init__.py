"""Deterministic simulator and theory harness for quantized randomized
coordinate descent on strongly convex least-squares problems."""

from .bounds import (
    DegenerateContraction,
    InvalidConfidence,
    SufficiencyCheck,
    TheoryInputs,
    TheoryReport,
    check_delta_sufficiency,
    contraction_constant,
    delta_bound,
    iteration_bound,
    markov_check,
    optimal_step,
)
from .data import (
    ConstantColumn,
    DataError,
    Dataset,
    EmptyFile,
    MissingColumn,
    ParseError,
    load_csv,
    normalize,
    synthesize,
    synthesize_regression,
    with_intercept,
    write_csv,
)
from .engine import (
    IterationRecord,
    RunConfig,
    ShadowMismatch,
    Trajectory,
    draw_uniform_coordinate,
    run,
    run_with_shadow,
)
from .montecarlo import MonteCarloSummary, estimate, theorem_check
from .objective import (
    NoConvergence,
    NotSymmetric,
    QuadraticObjective,
    SingularProblem,
    build_least_squares,
    gradient,
    partial_derivative,
    symmetric_extreme_eigenvalues,
)
from .quantizer import LevelOverflow, Quantizer
from .rng import SplitMix64

__version__ = "0.1.0"
