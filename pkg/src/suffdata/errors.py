"""Exception types shared across the package."""


class SuffdataError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(SuffdataError, ValueError):
    """Vector or matrix dimensions are inconsistent with the model."""


class InfeasibleModel(SuffdataError):
    """The decision polyhedron is empty."""


class UnboundedModel(SuffdataError):
    """The decision polyhedron is unbounded in some coordinate."""


class Infeasible(SuffdataError):
    """A polyhedron required to be nonempty is empty."""


class NumericalFailure(SuffdataError):
    """A solver could not certify a result within its iteration cap."""


class NodeLimitExceeded(SuffdataError):
    """Branch-and-bound exceeded its node budget."""


class ConfigError(SuffdataError):
    """A solver configuration violates its own invariants."""


class NonTermination(SuffdataError):
    """The direction-basis loop produced a nonzero value whose direction is
    already spanned; indicates an invariant breach rather than progress."""


class IllConditionedQueryBasis(SuffdataError):
    """Query basis matrix is too ill conditioned to invert reliably."""


class SamplingFailure(SuffdataError):
    """The interior of an uncertainty set could not be sampled."""


class ConvergenceFailure(SuffdataError):
    """Iterative quadratic solver exceeded its iteration cap."""


class BudgetExceeded(SuffdataError):
    """Brute-force enumeration would exceed the configured budget."""


class ParseError(SuffdataError):
    """A JSON input file does not match the expected schema."""
