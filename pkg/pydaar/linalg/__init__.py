"""Linear algebra module initialization."""

from pydaar.linalg.partial import (
    partial_out,
    prepare_instruments,
    residualize,
    standardize_columns,
    standardize_instruments,
)
from pydaar.linalg.svd import SvdFactors, svd_factorize, operator_norm_bound
from pydaar.linalg.ridge import (
    LeverageProfile,
    RidgeProjection,
    k_theta,
    leverage_diagnostics,
    leverage_profile,
    ridge_projection_at,
    shrinkage,
)
from pydaar.linalg.selection import (
    GridEvaluation,
    LambdaSelection,
    evaluate_criteria,
    select_lambda,
    theta_grid,
)

__all__ = [
    "partial_out",
    "prepare_instruments",
    "residualize",
    "standardize_columns",
    "standardize_instruments",
    "SvdFactors",
    "svd_factorize",
    "operator_norm_bound",
    "LeverageProfile",
    "RidgeProjection",
    "k_theta",
    "leverage_diagnostics",
    "leverage_profile",
    "ridge_projection_at",
    "shrinkage",
    "GridEvaluation",
    "LambdaSelection",
    "evaluate_criteria",
    "select_lambda",
    "theta_grid",
]
