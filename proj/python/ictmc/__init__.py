"""Lower expectations for imprecise continuous-time Markov chains."""

from ._ictmc import (
    Error,
    InvalidArgument,
    Model,
    ParseError,
    StepBudgetExceeded,
    ValidationError,
    format_number,
    matrix_exponential,
    step_count,
)

__all__ = [
    "Error",
    "InvalidArgument",
    "Model",
    "ParseError",
    "StepBudgetExceeded",
    "ValidationError",
    "format_number",
    "matrix_exponential",
    "step_count",
]
