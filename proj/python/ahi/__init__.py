"""Arithmetic-harmonic inequality index (J) and the Atkinson family."""

from ._core import (
    CellResult,
    ConfigError,
    ConvergenceError,
    DataError,
    DistributionSpec,
    DomainError,
    Error,
    EvaluationError,
    ExactExpectation,
    IndexEstimate,
    IndexUndefinedError,
    MomentExistenceError,
    MomentSet,
    SimulationConfig,
    SimulationResult,
    UnsupportedCaseError,
    asymptotic_variance,
    atkinson_sweep,
    ci_coverage,
    estimate_atkinson,
    estimate_index,
    expected_jhat,
    first_order_bias,
    gamma,
    gig,
    inverse_gaussian,
    moment_set,
    population_atkinson,
    population_index,
    run_grid,
    sample,
    summarize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
