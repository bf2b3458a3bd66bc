"""Priority weights from pairwise-comparison matrices with fixed reference concepts."""

from .baselines import EigenResult, WeightVector, ev_weights, gm_weights, principal_eigen
from .diagnostics import (
    CopReport,
    InconsistencyReport,
    PoipViolation,
    PopViolation,
    cop_check,
    estimation_error,
    inconsistency_report,
    koczkodaj_index,
    saaty_ci,
)
from .errors import (
    HreError,
    IncompleteMatrixError,
    InadmissibleSolutionError,
    NonConvergenceError,
    ParseError,
    SingularSystemError,
    SolveFailedError,
    ValidationError,
)
from .hre_solver import (
    JacobiRun,
    LinearSystem,
    RankOutcome,
    build_system,
    check_convergence,
    hre_rank,
    jacobi_iterate,
    select_best_iterate,
    solve_linear,
    synthesize,
)
from .matrix_core import (
    Issue,
    PcMatrix,
    Problem,
    ValidationReport,
    fill_known_ratios,
    is_reachable,
    parse_matrix,
    preprocess,
    restore_reciprocity,
    validate,
)
from .min_error_solver import (
    ErrorSystem,
    MinErrorResult,
    brute_force_min_error,
    build_error_system,
    hessian,
    solve_min_error,
    squared_error,
)
from .montecarlo import (
    ExperimentConfig,
    NoiseLevelSummary,
    TrialRecord,
    generate_consistent,
    perturb,
    run_experiment,
    summarize,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CopReport",
    "EigenResult",
    "ErrorSystem",
    "ExperimentConfig",
    "HreError",
    "IncompleteMatrixError",
    "InadmissibleSolutionError",
    "InconsistencyReport",
    "Issue",
    "JacobiRun",
    "LinearSystem",
    "MinErrorResult",
    "NoiseLevelSummary",
    "NonConvergenceError",
    "ParseError",
    "PcMatrix",
    "PoipViolation",
    "PopViolation",
    "Problem",
    "RankOutcome",
    "SingularSystemError",
    "SolveFailedError",
    "TrialRecord",
    "ValidationError",
    "ValidationReport",
    "WeightVector",
    "brute_force_min_error",
    "build_error_system",
    "build_system",
    "check_convergence",
    "cop_check",
    "estimation_error",
    "ev_weights",
    "fill_known_ratios",
    "generate_consistent",
    "gm_weights",
    "hessian",
    "hre_rank",
    "inconsistency_report",
    "is_reachable",
    "jacobi_iterate",
    "koczkodaj_index",
    "parse_matrix",
    "perturb",
    "preprocess",
    "principal_eigen",
    "restore_reciprocity",
    "run_experiment",
    "saaty_ci",
    "select_best_iterate",
    "solve_linear",
    "solve_min_error",
    "squared_error",
    "summarize",
    "synthesize",
    "validate",
    "write_csv",
]
