"""Exact maximum-likelihood learning for small discrete exponential families.

Covers plain, conditional, hidden-variable and conditional-with-hidden
families, all evaluated by full enumeration of the joint space.
"""

from .core import Dataset, FamilySpec, ParamVector, Role, VariableSpec, Variant
from .errors import (
    DegenerateClampError,
    EmptyDatasetError,
    MomentMatchError,
    NoInteriorMaximumError,
    ParseError,
    RowSchemaError,
    SchemaError,
    SpecError,
)
from .inference import (
    DiscreteDistribution,
    distribution,
    grad_log_partition,
    log_partition,
    log_prob_datum,
)
from .learning import (
    FitOptions,
    FitResult,
    Init,
    LineSearch,
    MomentReport,
    Status,
    fit,
    grad_log_likelihood,
    gradient_check,
    log_likelihood,
    moment_report,
    recession_direction,
)

__version__ = "0.1.0"
