"""Finite-horizon lexicographic and multi-quantile MDP planning."""

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DocumentError,
    DuplicateEntry,
    InvariantViolation,
    LexiplanError,
    ValidationFailed,
)
from .evaluation import cdf, evaluate_values, lower_quantile, propagate
from .lex import LexSolution, flmdp_solve, marginalize_rewards, restricted_backup
from .model import MdpInstance, Ordering, ValidatedInstance, lex_compare, validate
from .quantile import QuantileObjective, build_quantile_reward, mqo_solve, probe
from .rewards import RewardSpec

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "DimensionMismatch",
    "DocumentError",
    "DuplicateEntry",
    "InvariantViolation",
    "LexSolution",
    "LexiplanError",
    "MdpInstance",
    "Ordering",
    "QuantileObjective",
    "RewardSpec",
    "ValidatedInstance",
    "ValidationFailed",
    "build_quantile_reward",
    "cdf",
    "evaluate_values",
    "flmdp_solve",
    "lex_compare",
    "lower_quantile",
    "marginalize_rewards",
    "mqo_solve",
    "probe",
    "propagate",
    "restricted_backup",
    "validate",
]
