"""Mixed boundary value problems for Riemann-Liouville equations of order 1 < alpha <= 2."""

from .errors import (
    DomainError,
    FracMixError,
    GridMismatch,
    InvalidParams,
    MaxIterExceeded,
    NonConvergence,
    NumericError,
    OracleFailure,
    OrderViolation,
    RootNotFound,
    SingularPartUnresolved,
    ToleranceNotMet,
)
from .greens import ProblemParams
from .mlf import MLArgs, ml_deriv, ml_eval, recip_gamma
from .solver import SolverReport, WGridFunction

__version__ = "0.1.0"
