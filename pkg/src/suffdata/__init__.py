"""Sufficient decision datasets for linear programs under polyhedral
cost uncertainty: sufficiency checks, minimal query selection, and
decision recovery from observations."""

from .directions import CsMilpConfig, DirectionBasis, build_cs_milp, compute_dir_basis, default_config
from .errors import (
    BudgetExceeded,
    ConfigError,
    ConvergenceFailure,
    DimensionMismatch,
    IllConditionedQueryBasis,
    Infeasible,
    InfeasibleModel,
    NodeLimitExceeded,
    NonTermination,
    NumericalFailure,
    ParseError,
    SamplingFailure,
    SuffdataError,
    UnboundedModel,
)
from .linalg import SpanBasis, extend_basis, kernel_basis, project_onto_complement, subspace_equal
from .lp_solver import VertexSolution, find_point, solve_lp
from .milp_solver import MilpProblem, MilpSolution, solve_milp
from .model import (
    AffineFactor,
    Dataset,
    FullSpace,
    GeneralLP,
    HPolyhedron,
    ObservationVector,
    StandardLP,
    UncertaintySet,
    embed_cost,
    load_problem,
    observe,
    project_to_original,
    standardize,
)
from .recovery import RecoveryResult, fit_c_hat, noise_threshold_probe, recover_decision
from .selection import (
    QueryBasis,
    is_sufficient,
    is_sufficient_unrestricted,
    monte_carlo_sufficiency_check,
    select_queries,
)

__version__ = "0.1.0"

__all__ = [
    "AffineFactor", "BudgetExceeded", "ConfigError", "ConvergenceFailure",
    "CsMilpConfig", "Dataset", "DimensionMismatch", "DirectionBasis",
    "FullSpace", "GeneralLP", "HPolyhedron", "IllConditionedQueryBasis",
    "Infeasible", "InfeasibleModel", "MilpProblem", "MilpSolution",
    "NodeLimitExceeded", "NonTermination", "NumericalFailure",
    "ObservationVector", "ParseError", "QueryBasis", "RecoveryResult",
    "SamplingFailure", "SpanBasis", "StandardLP", "SuffdataError",
    "UnboundedModel", "UncertaintySet", "VertexSolution",
    "build_cs_milp", "compute_dir_basis", "default_config", "embed_cost",
    "extend_basis", "find_point", "fit_c_hat", "is_sufficient",
    "is_sufficient_unrestricted", "kernel_basis", "load_problem",
    "monte_carlo_sufficiency_check", "noise_threshold_probe", "observe",
    "project_onto_complement", "project_to_original", "recover_decision",
    "select_queries", "solve_lp", "solve_milp", "standardize",
    "subspace_equal",
]
